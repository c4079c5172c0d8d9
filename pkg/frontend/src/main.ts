/**
 * DOM wiring: binds a Workbench store to the four zones of index.html.
 *
 * Zone A is the query editor, zone B the k control, zone C the answer
 * grid, zone D the completion cards. The page talks to a qcomplete
 * service whose base URL comes from ?base=... (default the local
 * development port).
 */

import { Workbench, WorkbenchOptions } from "./state.js";
import { renderCompletions, renderQueryError, renderResult, renderStatus } from "./view.js";

const DEFAULT_BASE = "http://127.0.0.1:8177";

function requireElement<T extends HTMLElement>(root: ParentNode, selector: string): T {
  const el = root.querySelector<T>(selector);
  if (el === null) throw new Error(`missing element: ${selector}`);
  return el;
}

export function initWorkbench(root: Document, options: WorkbenchOptions): Workbench {
  const workbench = new Workbench(options);

  const editor = requireElement<HTMLTextAreaElement>(root, "#editor");
  const runButton = requireElement<HTMLButtonElement>(root, "#run");
  const kInput = requireElement<HTMLInputElement>(root, "#k");
  const completeButton = requireElement<HTMLButtonElement>(root, "#complete");
  const queryError = requireElement<HTMLElement>(root, "#query-error");
  const resultZone = requireElement<HTMLElement>(root, "#result");
  const completionZone = requireElement<HTMLElement>(root, "#completions");
  const statusLine = requireElement<HTMLElement>(root, "#status");

  editor.addEventListener("input", () => workbench.editText(editor.value));
  runButton.addEventListener("click", () => void workbench.submitQuery());
  kInput.addEventListener("change", () => workbench.setK(Number(kInput.value)));
  completeButton.addEventListener("click", () => void workbench.requestCompletions());
  completionZone.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("button.adopt")) {
      void workbench.adoptCompletion(Number(target.dataset.index));
    }
  });

  workbench.subscribe((state) => {
    if (editor.value !== state.editor_text) editor.value = state.editor_text;
    if (kInput.value !== String(state.k)) kInput.value = String(state.k);
    queryError.innerHTML = renderQueryError(state);
    resultZone.innerHTML = renderResult(state);
    completionZone.innerHTML = renderCompletions(state);
    statusLine.textContent = renderStatus(state);
    const busy = state.status.kind === "running";
    runButton.disabled = busy;
    completeButton.disabled = busy;
  });

  kInput.value = String(workbench.getState().k);
  return workbench;
}

// Boot in the browser; tests import the pieces directly instead.
if (typeof document !== "undefined" && document.querySelector("#editor") !== null) {
  const params = new URLSearchParams(window.location.search);
  const seedParam = params.get("seed");
  initWorkbench(document, {
    baseUrl: params.get("base") ?? DEFAULT_BASE,
    seed: seedParam === null ? undefined : Number(seedParam),
  });
}
