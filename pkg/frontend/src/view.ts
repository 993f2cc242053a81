// DOM rendering of a proof state. Every fragment of an item's canonical
// text becomes a span tagged with the path of the node that owns it, so
// pointing at the text selects the smallest enclosing node and the
// concatenated rendering is byte-identical to the server's.

import { GoalPayload, ItemPayload, Path, StatePayload } from "./model.js";

export interface NodeRef {
  goal: number;
  item: number;
  path: Path;
}

export interface ViewHandlers {
  onNodeClick(ref: NodeRef, widen: boolean): void;
  onItemDoubleClick(ref: NodeRef): void;
  onDragStart(ref: NodeRef): void;
  onDrop(ref: NodeRef | null): void;
  onAddHyp(): void;
  onAddExpr(): void;
  onUndo(): void;
  onRedo(): void;
  onExportTrace(): void;
  onSelectTab(index: number): void;
}

const SHAPE: Record<string, string> = { red: "●", blue: "■", green: "◆" };

function fragmentRef(span: Element): NodeRef {
  const item = Number(span.getAttribute("data-item"));
  const goal = Number(span.getAttribute("data-goal"));
  const raw = span.getAttribute("data-path") ?? "";
  const path = raw === "" ? [] : raw.split(",").map(Number);
  return { goal, item, path };
}

function renderItem(
  doc: Document,
  goal: GoalPayload,
  item: ItemPayload,
  handlers: ViewHandlers,
): HTMLElement {
  const box = doc.createElement("div");
  box.className = `item ${item.color}`;
  box.setAttribute("data-item", String(item.id));
  box.setAttribute("data-color", item.color);

  const marker = doc.createElement("span");
  marker.className = "marker";
  marker.textContent = SHAPE[item.color] + " ";
  marker.setAttribute("aria-hidden", "true");
  box.appendChild(marker);

  const body = doc.createElement("span");
  body.className = "item-text";
  for (const [text, path] of item.fragments) {
    const span = doc.createElement("span");
    span.className = "frag";
    span.textContent = text;
    span.setAttribute("data-goal", String(goal.id));
    span.setAttribute("data-item", String(item.id));
    span.setAttribute("data-path", path.join(","));
    if (item.color !== "green") {
      span.addEventListener("mousedown", (event) => {
        handlers.onDragStart(fragmentRef(span));
        event.preventDefault();
      });
      span.addEventListener("mouseup", () => handlers.onDrop(fragmentRef(span)));
      span.addEventListener("click", (event) => {
        handlers.onNodeClick(fragmentRef(span), (event as MouseEvent).altKey);
      });
    }
    body.appendChild(span);
  }
  box.appendChild(body);
  if (item.color !== "green") {
    box.addEventListener("dblclick", () =>
      handlers.onItemDoubleClick({ goal: goal.id, item: item.id, path: [] }),
    );
  }
  return box;
}

export function renderState(
  container: HTMLElement,
  state: StatePayload,
  activeTab: number,
  handlers: ViewHandlers,
): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";

  const toolbar = doc.createElement("div");
  toolbar.className = "toolbar";
  const buttons: [string, string, () => void][] = [
    ["+hyp", "btn-add-hyp", handlers.onAddHyp],
    ["+expr", "btn-add-expr", handlers.onAddExpr],
    ["undo", "btn-undo", handlers.onUndo],
    ["redo", "btn-redo", handlers.onRedo],
    ["export trace", "btn-export", handlers.onExportTrace],
  ];
  for (const [label, cls, fn] of buttons) {
    const button = doc.createElement("button");
    button.className = cls;
    button.textContent = label;
    button.addEventListener("click", fn);
    toolbar.appendChild(button);
  }
  container.appendChild(toolbar);

  if (state.solved) {
    const banner = doc.createElement("div");
    banner.className = "qed-banner";
    banner.textContent = "QED";
    container.appendChild(banner);
    return;
  }

  const tabs = doc.createElement("div");
  tabs.className = "tabs";
  state.goals.forEach((goal, index) => {
    const tab = doc.createElement("button");
    tab.className = "tab" + (index === activeTab ? " active" : "");
    tab.setAttribute("data-goal", String(goal.id));
    tab.textContent = `goal ${goal.id}`;
    tab.addEventListener("click", () => handlers.onSelectTab(index));
    tabs.appendChild(tab);
  });
  container.appendChild(tabs);

  const goal = state.goals[Math.min(activeTab, state.goals.length - 1)];
  const panel = doc.createElement("div");
  panel.className = "goal-panel";
  panel.setAttribute("data-goal", String(goal.id));

  const hyps = doc.createElement("div");
  hyps.className = "hypotheses";
  const concl = doc.createElement("div");
  concl.className = "conclusion";
  const objects = doc.createElement("div");
  objects.className = "objects";

  for (const item of goal.items) {
    const box = renderItem(doc, goal, item, handlers);
    if (item.color === "blue") hyps.appendChild(box);
    else if (item.color === "red") concl.appendChild(box);
    else objects.appendChild(box);
  }

  panel.appendChild(hyps);
  panel.appendChild(concl);
  container.appendChild(panel);
  container.appendChild(objects);

  const tooltip = doc.createElement("div");
  tooltip.className = "tooltip";
  tooltip.setAttribute("hidden", "");
  container.appendChild(tooltip);
}

export function highlightTargets(
  container: HTMLElement,
  targets: { item: number; path: Path }[],
): void {
  clearHighlights(container);
  for (const target of targets) {
    const selector = `.frag[data-item="${target.item}"][data-path="${target.path.join(",")}"]`;
    for (const span of Array.from(container.querySelectorAll(selector))) {
      span.classList.add("drop-ok");
    }
  }
}

export function clearHighlights(container: HTMLElement): void {
  for (const span of Array.from(container.querySelectorAll(".frag.drop-ok"))) {
    span.classList.remove("drop-ok");
  }
}

export function highlightedTargets(container: HTMLElement): { item: number; path: Path }[] {
  const seen = new Set<string>();
  const out: { item: number; path: Path }[] = [];
  for (const span of Array.from(container.querySelectorAll(".frag.drop-ok"))) {
    const item = Number(span.getAttribute("data-item"));
    const raw = span.getAttribute("data-path") ?? "";
    const key = `${item}:${raw}`;
    if (!seen.has(key)) {
      seen.add(key);
      out.push({ item, path: raw === "" ? [] : raw.split(",").map(Number) });
    }
  }
  return out;
}

export function showTooltip(container: HTMLElement, message: string): void {
  const tooltip = container.querySelector(".tooltip") as HTMLElement | null;
  if (tooltip) {
    tooltip.textContent = message;
    tooltip.removeAttribute("hidden");
  }
}
