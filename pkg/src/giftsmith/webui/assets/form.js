// Form state and the pure mapping from the form to the question payload
// the service understands. The option-row checkbox vector maps
// positionwise onto the preview's ~/= markers.
export const QTYPE_LABELS = {
    1: "True/False",
    2: "Multiple Choice",
    3: "Multiple Response",
    4: "Short Answer",
    5: "Matching",
    6: "Numeric",
};
export const MIN_OPTION_ROWS = 2;
export const DEFAULT_OPTION_ROWS = 4;
export function emptyOptionRow() {
    return { text: "", correct: false, feedback: "" };
}
export function emptyNumericRow() {
    return { mode: "point", value: "", tolerance: "", min: "", max: "" };
}
export function defaultForm() {
    return {
        courseId: "",
        qtype: 3,
        title: "",
        stem: "",
        tfAnswer: true,
        options: Array.from({ length: DEFAULT_OPTION_ROWS }, emptyOptionRow),
        pairs: [{ left: "", right: "" }, { left: "", right: "" }],
        numerics: [emptyNumericRow()],
        suffix: "",
        generalFeedback: "",
        dialect: "paper",
    };
}
export function addOptionRow(form) {
    return { ...form, options: [...form.options, emptyOptionRow()] };
}
export function removeOptionRow(form, index) {
    if (form.options.length <= MIN_OPTION_ROWS)
        return form;
    return { ...form, options: form.options.filter((_, i) => i !== index) };
}
export function toggleOption(form, index) {
    return {
        ...form,
        options: form.options.map((row, i) => i === index ? { ...row, correct: !row.correct } : row),
    };
}
function orNull(text) {
    const trimmed = text.trim();
    return trimmed ? trimmed : null;
}
function choiceRows(form, forceCorrect) {
    return form.options
        .filter((row) => row.text.trim())
        .map((row) => ({
        text: row.text.trim(),
        correct: forceCorrect || row.correct,
        weight: null,
        feedback: orNull(row.feedback),
    }));
}
function numericEntries(form) {
    const entries = [];
    for (const row of form.numerics) {
        if (row.mode === "point") {
            if (!row.value.trim())
                continue;
            entries.push({
                spec: {
                    kind: "point",
                    value: Number(row.value),
                    tolerance: row.tolerance.trim() ? Number(row.tolerance) : 0,
                },
                weight: null,
                feedback: null,
            });
        }
        else {
            if (!row.min.trim() || !row.max.trim())
                continue;
            entries.push({
                spec: { kind: "range", min: Number(row.min), max: Number(row.max) },
                weight: null,
                feedback: null,
            });
        }
    }
    return { kind: "numeric", entries };
}
export function formBody(form) {
    switch (form.qtype) {
        case 1:
            return { kind: "truefalse", answer: form.tfAnswer,
                feedback_wrong: null, feedback_right: null };
        case 4:
            return { kind: "shortanswer", answers: choiceRows(form, true) };
        case 5:
            return {
                kind: "matching",
                pairs: form.pairs
                    .filter((p) => p.left.trim() && p.right.trim())
                    .map((p) => ({ left: p.left.trim(), right: p.right.trim() })),
            };
        case 6:
            return numericEntries(form);
        default:
            return { kind: "choices", choices: choiceRows(form, false) };
    }
}
export function formToQuestionPayload(form) {
    return {
        title: orNull(form.title),
        format: null,
        stem: form.stem.trim(),
        suffix: form.suffix.trim(),
        body: formBody(form),
        general_feedback: orNull(form.generalFeedback),
    };
}
// Local completeness checks; the service's validation is authoritative
// and the save button additionally requires a clean preview.
export function localProblems(form) {
    const problems = [];
    if (!form.stem.trim())
        problems.push("stem required");
    const body = formBody(form);
    if (body.kind === "choices" && body.choices.length < 1) {
        problems.push("at least one option required");
    }
    if (body.kind === "shortanswer" && body.answers.length < 1) {
        problems.push("at least one accepted answer required");
    }
    if (body.kind === "matching" && body.pairs.length < 2) {
        problems.push("at least two complete pairs required");
    }
    if (body.kind === "numeric" && body.entries.length < 1) {
        problems.push("at least one numeric answer required");
    }
    if (!form.courseId)
        problems.push("course required");
    return problems;
}
