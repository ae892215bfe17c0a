// Form state and the pure mapping from the form to the question payload
// the service understands. The option-row checkbox vector maps
// positionwise onto the preview's ~/= markers.

export type Dialect = "paper" | "moodle";

export const QTYPE_LABELS: Record<number, string> = {
  1: "True/False",
  2: "Multiple Choice",
  3: "Multiple Response",
  4: "Short Answer",
  5: "Matching",
  6: "Numeric",
};

export const MIN_OPTION_ROWS = 2;
export const DEFAULT_OPTION_ROWS = 4;

export interface OptionRow {
  text: string;
  correct: boolean;
  feedback: string;
}

export interface PairRow {
  left: string;
  right: string;
}

export interface NumericRow {
  mode: "point" | "range";
  value: string;
  tolerance: string;
  min: string;
  max: string;
}

export interface FormState {
  courseId: string;
  qtype: number;
  title: string;
  stem: string;
  tfAnswer: boolean;
  options: OptionRow[];
  pairs: PairRow[];
  numerics: NumericRow[];
  suffix: string;
  generalFeedback: string;
  dialect: Dialect;
}

export function emptyOptionRow(): OptionRow {
  return { text: "", correct: false, feedback: "" };
}

export function emptyNumericRow(): NumericRow {
  return { mode: "point", value: "", tolerance: "", min: "", max: "" };
}

export function defaultForm(): FormState {
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

export function addOptionRow(form: FormState): FormState {
  return { ...form, options: [...form.options, emptyOptionRow()] };
}

export function removeOptionRow(form: FormState, index: number): FormState {
  if (form.options.length <= MIN_OPTION_ROWS) return form;
  return { ...form, options: form.options.filter((_, i) => i !== index) };
}

export function toggleOption(form: FormState, index: number): FormState {
  return {
    ...form,
    options: form.options.map((row, i) =>
      i === index ? { ...row, correct: !row.correct } : row),
  };
}

// -- payload mirror of the bank record schema --

export interface ChoicePayload {
  text: string;
  correct: boolean;
  weight: number | null;
  feedback: string | null;
}

export type BodyPayload =
  | { kind: "truefalse"; answer: boolean;
      feedback_wrong: string | null; feedback_right: string | null }
  | { kind: "choices"; choices: ChoicePayload[] }
  | { kind: "shortanswer"; answers: ChoicePayload[] }
  | { kind: "matching"; pairs: { left: string; right: string }[] }
  | { kind: "numeric"; entries: {
      spec: { kind: "point"; value: number; tolerance: number }
          | { kind: "range"; min: number; max: number };
      weight: number | null; feedback: string | null }[] };

export interface QuestionPayload {
  title: string | null;
  format: string | null;
  stem: string;
  suffix: string;
  body: BodyPayload;
  general_feedback: string | null;
}

function orNull(text: string): string | null {
  const trimmed = text.trim();
  return trimmed ? trimmed : null;
}

function choiceRows(form: FormState, forceCorrect: boolean): ChoicePayload[] {
  return form.options
    .filter((row) => row.text.trim())
    .map((row) => ({
      text: row.text.trim(),
      correct: forceCorrect || row.correct,
      weight: null,
      feedback: orNull(row.feedback),
    }));
}

function numericEntries(form: FormState): BodyPayload {
  const entries = [];
  for (const row of form.numerics) {
    if (row.mode === "point") {
      if (!row.value.trim()) continue;
      entries.push({
        spec: {
          kind: "point" as const,
          value: Number(row.value),
          tolerance: row.tolerance.trim() ? Number(row.tolerance) : 0,
        },
        weight: null,
        feedback: null,
      });
    } else {
      if (!row.min.trim() || !row.max.trim()) continue;
      entries.push({
        spec: { kind: "range" as const, min: Number(row.min), max: Number(row.max) },
        weight: null,
        feedback: null,
      });
    }
  }
  return { kind: "numeric", entries };
}

export function formBody(form: FormState): BodyPayload {
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

export function formToQuestionPayload(form: FormState): QuestionPayload {
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
export function localProblems(form: FormState): string[] {
  const problems: string[] = [];
  if (!form.stem.trim()) problems.push("stem required");
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
  if (!form.courseId) problems.push("course required");
  return problems;
}
