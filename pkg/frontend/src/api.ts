// Typed client for the authoring service. The UI never builds GIFT text
// itself; every GIFT string on screen comes from these endpoints.

import type { Dialect, QuestionPayload } from "./form.js";

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  message: string;
  line: number | null;
  column: number | null;
}

export interface CourseInfo {
  course_id: string;
  subject: string;
}

export interface RecordInfo {
  record_id: number;
  course_id: string;
  qtype_code: number;
  question: QuestionPayload;
  created_at: string;
  updated_at: string;
}

export interface PreviewResult {
  status: number;
  gift: string | null;
  qtypeCode: number | null;
  diagnostics: Diagnostic[];
}

let BASE = "";

// Node-based tests point the client at a spawned service; in the browser
// the base stays empty (same-origin).
export function setApiBase(base: string): void {
  BASE = base;
}

async function requestJson(method: string, path: string, payload?: unknown):
    Promise<{ status: number; body: any }> {
  const response = await fetch(BASE + path, {
    method,
    headers: payload === undefined ? undefined
      : { "Content-Type": "application/json" },
    body: payload === undefined ? undefined : JSON.stringify(payload),
  });
  return { status: response.status, body: await response.json() };
}

export async function listCourses(): Promise<CourseInfo[]> {
  const { body } = await requestJson("GET", "/api/courses");
  return body.courses;
}

export async function createCourse(courseId: string, subject: string):
    Promise<{ status: number; diagnostics: Diagnostic[] }> {
  const { status, body } = await requestJson("POST", "/api/courses",
    { course_id: courseId, subject });
  return { status, diagnostics: body.diagnostics ?? [] };
}

export async function previewQuestion(question: QuestionPayload,
                                      dialect: Dialect): Promise<PreviewResult> {
  const { status, body } = await requestJson("POST", "/api/preview",
    { question, dialect });
  return {
    status,
    gift: body.gift ?? null,
    qtypeCode: body.qtype_code ?? null,
    diagnostics: body.diagnostics ?? [],
  };
}

export async function saveQuestion(courseId: string, question: QuestionPayload,
                                   dialect: Dialect):
    Promise<{ status: number; recordId: number | null; diagnostics: Diagnostic[] }> {
  const { status, body } = await requestJson("POST", "/api/questions",
    { course_id: courseId, question, dialect });
  return {
    status,
    recordId: body.record_id ?? null,
    diagnostics: body.diagnostics ?? [],
  };
}

export async function listQuestions(courseId?: string, qtype?: number):
    Promise<RecordInfo[]> {
  const query = new URLSearchParams();
  if (courseId) query.set("course", courseId);
  if (qtype) query.set("type", String(qtype));
  const suffix = query.toString() ? `?${query}` : "";
  const { body } = await requestJson("GET", `/api/questions${suffix}`);
  return body.questions;
}

export async function deleteQuestion(recordId: number): Promise<number> {
  const { status } = await requestJson("DELETE", `/api/questions/${recordId}`);
  return status;
}

export function exportUrl(courseId: string | undefined, qtype: number | undefined,
                          dialect: Dialect): string {
  const query = new URLSearchParams();
  if (courseId) query.set("course", courseId);
  if (qtype) query.set("type", String(qtype));
  query.set("dialect", dialect);
  return `${BASE}/api/export?${query}`;
}
