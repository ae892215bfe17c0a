// Typed client for the authoring service. The UI never builds GIFT text
// itself; every GIFT string on screen comes from these endpoints.
let BASE = "";
// Node-based tests point the client at a spawned service; in the browser
// the base stays empty (same-origin).
export function setApiBase(base) {
    BASE = base;
}
async function requestJson(method, path, payload) {
    const response = await fetch(BASE + path, {
        method,
        headers: payload === undefined ? undefined
            : { "Content-Type": "application/json" },
        body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    return { status: response.status, body: await response.json() };
}
export async function listCourses() {
    const { body } = await requestJson("GET", "/api/courses");
    return body.courses;
}
export async function createCourse(courseId, subject) {
    const { status, body } = await requestJson("POST", "/api/courses", { course_id: courseId, subject });
    return { status, diagnostics: body.diagnostics ?? [] };
}
export async function previewQuestion(question, dialect) {
    const { status, body } = await requestJson("POST", "/api/preview", { question, dialect });
    return {
        status,
        gift: body.gift ?? null,
        qtypeCode: body.qtype_code ?? null,
        diagnostics: body.diagnostics ?? [],
    };
}
export async function saveQuestion(courseId, question, dialect) {
    const { status, body } = await requestJson("POST", "/api/questions", { course_id: courseId, question, dialect });
    return {
        status,
        recordId: body.record_id ?? null,
        diagnostics: body.diagnostics ?? [],
    };
}
export async function listQuestions(courseId, qtype) {
    const query = new URLSearchParams();
    if (courseId)
        query.set("course", courseId);
    if (qtype)
        query.set("type", String(qtype));
    const suffix = query.toString() ? `?${query}` : "";
    const { body } = await requestJson("GET", `/api/questions${suffix}`);
    return body.questions;
}
export async function deleteQuestion(recordId) {
    const { status } = await requestJson("DELETE", `/api/questions/${recordId}`);
    return status;
}
export function exportUrl(courseId, qtype, dialect) {
    const query = new URLSearchParams();
    if (courseId)
        query.set("course", courseId);
    if (qtype)
        query.set("type", String(qtype));
    query.set("dialect", dialect);
    return `${BASE}/api/export?${query}`;
}
