// Single-page authoring front end: pick course and type, fill the stem
// and options, toggle per-option correctness, watch the live GIFT
// preview, save to the bank, export.

import {
  createCourse,
  deleteQuestion,
  Diagnostic,
  exportUrl,
  listCourses,
  listQuestions,
  previewQuestion,
  RecordInfo,
  saveQuestion,
} from "./api.js";
import {
  addOptionRow,
  defaultForm,
  emptyNumericRow,
  FormState,
  formToQuestionPayload,
  localProblems,
  MIN_OPTION_ROWS,
  QTYPE_LABELS,
  removeOptionRow,
} from "./form.js";

let form: FormState = defaultForm();
let lastGoodPreview = "";
let previewClean = false;
let previewTimer: number | undefined;

const app = document.querySelector("#app") as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, attrs: Record<string, string> = {}, ...children: (Node | string)[]):
    HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function textInput(value: string, placeholder: string,
                   onInput: (v: string) => void): HTMLInputElement {
  const input = el("input", { type: "text", placeholder });
  input.value = value;
  input.oninput = () => { onInput(input.value); schedulePreview(); };
  return input;
}

function update(change: Partial<FormState>): void {
  form = { ...form, ...change };
  render();
  schedulePreview();
}

// -- preview ----------------------------------------------------------------

function schedulePreview(): void {
  window.clearTimeout(previewTimer);
  previewTimer = window.setTimeout(refreshPreview, 250);
}

async function refreshPreview(): Promise<void> {
  const pre = document.querySelector("#preview") as HTMLPreElement;
  const diagBox = document.querySelector("#diagnostics") as HTMLElement;
  const banner = document.querySelector("#banner") as HTMLElement;
  const typeLabel = document.querySelector("#qtype-label") as HTMLElement;
  const problems = localProblems(form);
  try {
    const result = await previewQuestion(formToQuestionPayload(form), form.dialect);
    banner.hidden = true;
    renderDiagnostics(diagBox, result.diagnostics, problems);
    if (result.status === 200 && result.gift !== null) {
      lastGoodPreview = result.gift;
      previewClean = !result.diagnostics.some((d) => d.severity === "error");
      typeLabel.textContent = result.qtypeCode
        ? `type ${result.qtypeCode}: ${QTYPE_LABELS[result.qtypeCode]}` : "";
    } else {
      previewClean = false;
    }
    pre.textContent = lastGoodPreview;
  } catch {
    banner.hidden = false;
    previewClean = false;
    pre.textContent = lastGoodPreview;
  }
  const save = document.querySelector("#save") as HTMLButtonElement;
  save.disabled = !previewClean || problems.length > 0;
}

function renderDiagnostics(box: HTMLElement, diagnostics: Diagnostic[],
                           problems: string[]): void {
  box.replaceChildren();
  for (const message of problems) {
    box.append(el("div", { class: "diag local" }, message));
  }
  for (const diag of diagnostics) {
    box.append(el("div", { class: `diag ${diag.severity}` },
                  `${diag.severity}: ${diag.message}`));
  }
}

// -- form panels --------------------------------------------------------------

function courseRow(courses: { course_id: string; subject: string }[]): HTMLElement {
  const select = el("select", { id: "course" });
  select.append(el("option", { value: "" }, "choose course"));
  for (const course of courses) {
    const option = el("option", { value: course.course_id },
                      `${course.course_id} (${course.subject})`);
    select.append(option);
  }
  select.value = form.courseId;
  select.onchange = () => update({ courseId: select.value });

  const addButton = el("button", { type: "button" }, "new course");
  addButton.onclick = async () => {
    const courseId = window.prompt("Course ID (letters, digits, - _):");
    if (!courseId) return;
    const subject = window.prompt("Subject:") || "";
    const result = await createCourse(courseId, subject);
    if (result.status === 201) {
      form = { ...form, courseId };
      await reloadCourses();
      render();
    } else {
      window.alert(result.diagnostics.map((d) => d.message).join("\n")
                   || "could not create course");
    }
  };
  return el("div", { class: "row" },
            el("label", {}, "Course "), select, addButton);
}

function typeRow(): HTMLElement {
  const select = el("select", {});
  for (const [code, label] of Object.entries(QTYPE_LABELS)) {
    select.append(el("option", { value: code }, `${code}. ${label}`));
  }
  select.value = String(form.qtype);
  select.onchange = () => update({ qtype: Number(select.value) });
  const dialect = el("select", {});
  dialect.append(el("option", { value: "paper" }, "paper dialect"));
  dialect.append(el("option", { value: "moodle" }, "moodle dialect"));
  dialect.value = form.dialect;
  dialect.onchange = () =>
    update({ dialect: dialect.value as FormState["dialect"] });
  return el("div", { class: "row" },
            el("label", {}, "Type "), select,
            el("label", {}, " Output "), dialect);
}

function optionsEditor(withCheckboxes: boolean): HTMLElement {
  const box = el("div", { class: "options" });
  form.options.forEach((row, index) => {
    const check = el("input", { type: "checkbox", title: "correct?" });
    check.checked = row.correct;
    check.onchange = () => {
      form.options[index].correct = check.checked;
      schedulePreview();
    };
    const text = textInput(row.text, `option ${index + 1}`,
                           (v) => { form.options[index].text = v; });
    const feedback = textInput(row.feedback, "feedback (optional)",
                               (v) => { form.options[index].feedback = v; });
    const remove = el("button", { type: "button", title: "remove row" }, "x");
    remove.disabled = form.options.length <= MIN_OPTION_ROWS;
    remove.onclick = () => update(removeOptionRow(form, index));
    const line = el("div", { class: "row option" });
    if (withCheckboxes) line.append(check);
    line.append(text, feedback, remove);
    box.append(line);
  });
  const add = el("button", { type: "button" }, "add option");
  add.onclick = () => update(addOptionRow(form));
  box.append(add);
  return box;
}

function pairsEditor(): HTMLElement {
  const box = el("div", { class: "options" });
  form.pairs.forEach((pair, index) => {
    const left = textInput(pair.left, "left", (v) => { form.pairs[index].left = v; });
    const right = textInput(pair.right, "matches", (v) => { form.pairs[index].right = v; });
    const remove = el("button", { type: "button" }, "x");
    remove.disabled = form.pairs.length <= 2;
    remove.onclick = () =>
      update({ pairs: form.pairs.filter((_, i) => i !== index) });
    box.append(el("div", { class: "row option" }, left, " -> ", right, remove));
  });
  const add = el("button", { type: "button" }, "add pair");
  add.onclick = () => update({ pairs: [...form.pairs, { left: "", right: "" }] });
  box.append(add);
  return box;
}

function numericEditor(): HTMLElement {
  const box = el("div", { class: "options" });
  form.numerics.forEach((row, index) => {
    const mode = el("select", {});
    mode.append(el("option", { value: "point" }, "value ± tolerance"));
    mode.append(el("option", { value: "range" }, "min .. max"));
    mode.value = row.mode;
    mode.onchange = () => {
      form.numerics[index].mode = mode.value as "point" | "range";
      render();
      schedulePreview();
    };
    const line = el("div", { class: "row option" }, mode);
    if (row.mode === "point") {
      line.append(
        textInput(row.value, "value", (v) => { form.numerics[index].value = v; }),
        textInput(row.tolerance, "tolerance", (v) => { form.numerics[index].tolerance = v; }));
    } else {
      line.append(
        textInput(row.min, "min", (v) => { form.numerics[index].min = v; }),
        textInput(row.max, "max", (v) => { form.numerics[index].max = v; }));
    }
    const remove = el("button", { type: "button" }, "x");
    remove.disabled = form.numerics.length <= 1;
    remove.onclick = () =>
      update({ numerics: form.numerics.filter((_, i) => i !== index) });
    line.append(remove);
    box.append(line);
  });
  const add = el("button", { type: "button" }, "add answer");
  add.onclick = () => update({ numerics: [...form.numerics, emptyNumericRow()] });
  box.append(add);
  return box;
}

function tfEditor(): HTMLElement {
  const select = el("select", {});
  select.append(el("option", { value: "true" }, "True"));
  select.append(el("option", { value: "false" }, "False"));
  select.value = String(form.tfAnswer);
  select.onchange = () => update({ tfAnswer: select.value === "true" });
  return el("div", { class: "row" }, el("label", {}, "Answer "), select);
}

function editorFor(qtype: number): HTMLElement {
  if (qtype === 1) return tfEditor();
  if (qtype === 5) return pairsEditor();
  if (qtype === 6) return numericEditor();
  return optionsEditor(qtype !== 4);
}

async function submit(): Promise<void> {
  const result = await saveQuestion(form.courseId, formToQuestionPayload(form),
                                    form.dialect);
  const status = document.querySelector("#save-status") as HTMLElement;
  if (result.status === 201 && result.recordId !== null) {
    status.textContent = `saved as record ${result.recordId}`;
    form = {
      ...defaultForm(),
      courseId: form.courseId,
      qtype: form.qtype,
      dialect: form.dialect,
    };
    render();
    schedulePreview();
    await refreshBrowse();
  } else {
    status.textContent = result.diagnostics.map((d) => d.message).join("; ")
      || `save failed (${result.status})`;
  }
}

// -- bank browser -------------------------------------------------------------

async function refreshBrowse(): Promise<void> {
  const table = document.querySelector("#records") as HTMLElement;
  const courseFilter =
    (document.querySelector("#browse-course") as HTMLSelectElement).value;
  const typeFilter =
    (document.querySelector("#browse-type") as HTMLSelectElement).value;
  let records: RecordInfo[];
  try {
    records = await listQuestions(courseFilter || undefined,
                                  typeFilter ? Number(typeFilter) : undefined);
  } catch {
    return;
  }
  table.replaceChildren(el("div", { class: "row head" },
    el("span", { class: "cell id" }, "id"),
    el("span", { class: "cell" }, "course"),
    el("span", { class: "cell" }, "type"),
    el("span", { class: "cell wide" }, "stem"),
    el("span", { class: "cell" }, "")));
  for (const record of records) {
    const remove = el("button", { type: "button" }, "delete");
    remove.onclick = async () => {
      await deleteQuestion(record.record_id);
      await refreshBrowse();
    };
    table.append(el("div", { class: "row" },
      el("span", { class: "cell id" }, String(record.record_id)),
      el("span", { class: "cell" }, record.course_id),
      el("span", { class: "cell" },
         `${record.qtype_code} ${QTYPE_LABELS[record.qtype_code]}`),
      el("span", { class: "cell wide" }, record.question.stem),
      remove));
  }
  const download = document.querySelector("#download") as HTMLAnchorElement;
  download.href = exportUrl(courseFilter || undefined,
                            typeFilter ? Number(typeFilter) : undefined,
                            form.dialect);
}

// -- page assembly --------------------------------------------------------------

let courses: { course_id: string; subject: string }[] = [];

async function reloadCourses(): Promise<void> {
  try {
    courses = await listCourses();
  } catch {
    courses = [];
  }
  const browseCourse = document.querySelector("#browse-course") as HTMLSelectElement;
  const keep = browseCourse.value;
  browseCourse.replaceChildren(el("option", { value: "" }, "all courses"));
  for (const course of courses) {
    browseCourse.append(el("option", { value: course.course_id }, course.course_id));
  }
  browseCourse.value = keep;
}

function render(): void {
  const panel = document.querySelector("#form-panel") as HTMLElement;
  const saveButton = el("button", { type: "button", id: "save" }, "save to bank");
  saveButton.disabled = true;
  saveButton.onclick = submit;

  panel.replaceChildren(
    courseRow(courses),
    typeRow(),
    el("div", { class: "row" }, el("label", {}, "Title "),
       textInput(form.title, "optional", (v) => { form.title = v; })),
    el("div", { class: "row" }, el("label", {}, "Stem "),
       textInput(form.stem, "question text", (v) => { form.stem = v; })),
    editorFor(form.qtype),
    (form.qtype === 2 || form.qtype === 3 || form.qtype === 4)
      ? el("div", { class: "row" }, el("label", {}, "After blank "),
           textInput(form.suffix, "stem text after the answer (optional)",
                     (v) => { form.suffix = v; }))
      : el("span", {}),
    el("div", { class: "row" }, el("label", {}, "Feedback "),
       textInput(form.generalFeedback, "general feedback (optional)",
                 (v) => { form.generalFeedback = v; })),
    el("div", { class: "row" }, saveButton,
       el("span", { id: "save-status" })),
  );
}

function install(): void {
  const banner = el("div", { id: "banner", class: "banner" },
                    "service unreachable; showing last good preview");
  banner.hidden = true;

  const browseCourse = el("select", { id: "browse-course" });
  const browseType = el("select", { id: "browse-type" });
  browseType.append(el("option", { value: "" }, "all types"));
  for (const [code, label] of Object.entries(QTYPE_LABELS)) {
    browseType.append(el("option", { value: code }, label));
  }
  browseCourse.onchange = refreshBrowse;
  browseType.onchange = refreshBrowse;
  const download = el("a", { id: "download", href: "#" }, "download export");

  app.replaceChildren(
    el("h1", {}, "giftsmith"),
    banner,
    el("div", { class: "columns" },
      el("section", { id: "form-panel", class: "pane" }),
      el("section", { class: "pane" },
        el("h2", {}, "GIFT preview ", el("small", { id: "qtype-label" })),
        el("pre", { id: "preview" }),
        el("div", { id: "diagnostics" }))),
    el("section", {},
      el("h2", {}, "Bank"),
      el("div", { class: "row" }, browseCourse, browseType, download),
      el("div", { id: "records" })),
  );

  render();
  reloadCourses().then(() => { render(); refreshBrowse(); });
  schedulePreview();
}

install();
