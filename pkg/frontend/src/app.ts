// The proof UI: session state, drag controller with candidate caching,
// click dispatch, and the single-flight action queue. All logic lives on
// the server; this class only renders payloads and relays gestures.

import { ApiError, SessionApi } from "./api.js";
import { CandidateEntry, Path, StatePayload } from "./model.js";
import {
  NodeRef,
  clearHighlights,
  highlightTargets,
  highlightedTargets,
  renderState,
  showTooltip,
} from "./view.js";

interface DragState {
  src: NodeRef;
  // legal drop paths per destination item id
  legal: Map<number, CandidateEntry[]>;
}

export class App {
  state: StatePayload | null = null;
  activeTab = 0;
  drag: DragState | null = null;
  private api: SessionApi | null = null;
  private queue: Promise<void> = Promise.resolve();
  private candidateCache = new Map<string, CandidateEntry[]>();
  prompts = {
    hyp: (): string | null => null,
    expr: (): [string, string] | null => null,
  };

  constructor(
    private container: HTMLElement,
    private baseUrl: string,
  ) {}

  async start(problem: string): Promise<void> {
    const [api, state] = await SessionApi.create(this.baseUrl, problem);
    this.api = api;
    this.state = state;
    this.activeTab = 0;
    this.render();
  }

  get sessionId(): string {
    return this.api ? this.api.sessionId : "";
  }

  render(): void {
    if (!this.state) return;
    renderState(this.container, this.state, this.activeTab, {
      onNodeClick: (ref, widen) => this.clickNode(ref, widen),
      onItemDoubleClick: (ref) => this.clickNode(ref, false),
      onDragStart: (ref) => void this.beginDrag(ref),
      onDrop: (ref) => void this.drop(ref),
      onAddHyp: () => {
        const text = this.prompts.hyp();
        if (text !== null) void this.addHyp(text);
      },
      onAddExpr: () => {
        const entry = this.prompts.expr();
        if (entry !== null) void this.addExpr(entry[0], entry[1]);
      },
      onUndo: () => void this.post({ type: "undo" }),
      onRedo: () => void this.post({ type: "redo" }),
      onExportTrace: () => void this.exportTrace(),
      onSelectTab: (index) => {
        this.activeTab = index;
        this.render();
      },
    });
  }

  /** Download the replayable trace of this session as JSON. */
  async exportTrace(): Promise<unknown> {
    if (!this.api) return null;
    const trace = await this.api.trace();
    const text = JSON.stringify(trace, null, 2);
    const doc = this.container.ownerDocument;
    const view = doc.defaultView as (Window & typeof globalThis) | null;
    if (view && typeof view.URL?.createObjectURL === "function") {
      const blob = new view.Blob([text], { type: "application/json" });
      const anchor = doc.createElement("a");
      anchor.href = view.URL.createObjectURL(blob);
      anchor.download = "trace.json";
      anchor.click();
      view.URL.revokeObjectURL(anchor.href);
    }
    return trace;
  }

  // -- gestures -------------------------------------------------------------

  activeGoal(): number {
    if (!this.state || this.state.goals.length === 0) return -1;
    const index = Math.min(this.activeTab, this.state.goals.length - 1);
    return this.state.goals[index].id;
  }

  /** Query legal drop targets for every other item; highlight them. */
  async beginDrag(src: NodeRef): Promise<void> {
    if (!this.api || !this.state) return;
    const goal = this.state.goals.find((g) => g.id === src.goal);
    if (!goal) return;
    const legal = new Map<number, CandidateEntry[]>();
    for (const item of goal.items) {
      if (item.id === src.item || item.color === "green") continue;
      const key = `${src.item}:${src.path.join(",")}:${item.id}`;
      let found = this.candidateCache.get(key);
      if (found === undefined) {
        found = await this.api.candidates(src.goal, src.item, src.path, item.id);
        this.candidateCache.set(key, found);
      }
      legal.set(item.id, found);
    }
    this.drag = { src, legal };
    const targets: { item: number; path: Path }[] = [];
    for (const [itemId, entries] of legal) {
      for (const entry of entries) {
        targets.push({ item: itemId, path: entry.path });
      }
    }
    highlightTargets(this.container, targets);
  }

  highlighted(): { item: number; path: Path }[] {
    return highlightedTargets(this.container);
  }

  /** Drop on a node posts the action (the server is the judge); dropping
   * outside any node, or on the dragged item itself, is a no-op. */
  async drop(target: NodeRef | null): Promise<void> {
    const drag = this.drag;
    this.drag = null;
    clearHighlights(this.container);
    if (!drag || !target || target.item === drag.src.item) return;
    await this.post({
      type: "dnd",
      goal: drag.src.goal,
      src_item: drag.src.item,
      src_path: drag.src.path,
      dst_item: target.item,
      dst_path: target.path,
    });
  }

  cancelDrag(): void {
    this.drag = null;
    clearHighlights(this.container);
  }

  clickNode(ref: NodeRef, widen: boolean): void {
    const path = widen && ref.path.length > 0 ? ref.path.slice(0, -1) : ref.path;
    void this.post({ type: "click", goal: ref.goal, item: ref.item, path });
  }

  addHyp(formula: string): Promise<void> {
    return this.post({ type: "add_hyp", goal: this.activeGoal(), formula });
  }

  addExpr(name: string, term: string): Promise<void> {
    return this.post({ type: "add_expr", goal: this.activeGoal(), name, term });
  }

  undo(): Promise<void> {
    return this.post({ type: "undo" });
  }

  redo(): Promise<void> {
    return this.post({ type: "redo" });
  }

  /** One in-flight action at a time; later gestures queue behind it. */
  post(action: Parameters<SessionApi["act"]>[0]): Promise<void> {
    const run = async () => {
      if (!this.api) return;
      try {
        const out = await this.api.act(action);
        this.state = out.state;
        this.candidateCache.clear();
        if (this.activeTab >= out.state.goals.length) {
          this.activeTab = Math.max(0, out.state.goals.length - 1);
        }
        this.render();
      } catch (err) {
        if (err instanceof ApiError) {
          if (err.reason === "no_click_action") return; // ignored silently
          showTooltip(this.container, err.message);
          return;
        }
        throw err;
      }
    };
    this.queue = this.queue.then(run, run);
    return this.queue;
  }

  /** Wait for every queued action to settle (used by scripted sessions). */
  idle(): Promise<void> {
    return this.queue;
  }

  tooltipText(): string | null {
    const tooltip = this.container.querySelector(".tooltip");
    if (!tooltip || tooltip.hasAttribute("hidden")) return null;
    return tooltip.textContent;
  }

  isSolved(): boolean {
    return this.container.querySelector(".qed-banner") !== null;
  }
}
