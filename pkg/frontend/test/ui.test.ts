// Scripted browser session against the real session service: the UI is
// rendered in happy-dom, gestures are driven through the same handlers
// the pointer events use, and every displayed transformation must equal
// what the server returned.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { Window } from "happy-dom";

import { App } from "../src/app.js";
import { SessionApi } from "../src/api.js";

const PORT = 8612 + (process.pid % 137);
const BASE = `http://127.0.0.1:${PORT}`;

const ARISTOTLE = `hyp forall x. Hum(x) => Mort(x)
hyp Hum(Socr)
goal Mort(Socr)
`;

const CYCLIC = `hyp forall x. exists y. R(x,y)
goal exists y'. forall x'. R(x',y')
`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("session service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "linkprover", "serve", "--port", String(PORT)],
    { cwd: "..", stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server.kill();
});

function makeApp(): { app: App; container: HTMLElement } {
  const window = new Window();
  const container = window.document.createElement("div") as unknown as HTMLElement;
  window.document.body.appendChild(container as never);
  return { app: new App(container, BASE), container };
}

function frag(container: HTMLElement, item: number, path: number[]): HTMLElement {
  const selector = `.frag[data-item="${item}"][data-path="${path.join(",")}"]`;
  const span = container.querySelector(selector);
  expect(span, `fragment ${selector}`).not.toBeNull();
  return span as HTMLElement;
}

describe("proof by two drags", () => {
  it("renders the goal with colored items and exact server text", async () => {
    const { app, container } = makeApp();
    await app.start(ARISTOTLE);

    const blues = Array.from(container.querySelectorAll(".item.blue .item-text"));
    const reds = Array.from(container.querySelectorAll(".item.red .item-text"));
    expect(blues.map((element) => element.textContent)).toEqual([
      "forall x. Hum(x) => Mort(x)",
      "Hum(Socr)",
    ]);
    expect(reds.map((element) => element.textContent)).toEqual(["Mort(Socr)"]);

    // the rendered text is byte-identical to the payload's canonical text
    const payload = await new SessionApi(BASE, app.sessionId).state();
    for (const item of payload.goals[0].items) {
      const box = container.querySelector(`.item[data-item="${item.id}"] .item-text`);
      expect(box?.textContent).toBe(item.text);
    }
  });

  it("highlights exactly the server's candidates, then proves by two drags", async () => {
    const { app, container } = makeApp();
    await app.start(ARISTOTLE);

    // first drag: Mort(x) out of the first hypothesis
    await app.beginDrag({ goal: 1, item: 1, path: [0, 1] });
    const highlighted = app.highlighted();
    const api = new SessionApi(BASE, app.sessionId);
    const expected = [
      ...(await api.candidates(1, 1, [0, 1], 2)).map((c) => ({ item: 2, path: c.path })),
      ...(await api.candidates(1, 1, [0, 1], 3)).map((c) => ({ item: 3, path: c.path })),
    ];
    expect(highlighted).toEqual(expected);
    expect(highlighted).toEqual([{ item: 3, path: [] }]);

    // drop on the conclusion: backward step
    await app.drop({ goal: 1, item: 3, path: [] });
    await app.idle();
    const red = container.querySelector(".item.red .item-text");
    expect(red?.textContent).toBe("Hum(Socr)");

    // second drag: the Hum(Socr) hypothesis onto the new conclusion,
    // driven through real pointer events on the fragments
    const goalPanel = container.querySelector(".goal-panel");
    const goalId = Number(goalPanel?.getAttribute("data-goal"));
    const redBox = container.querySelector(".item.red") as HTMLElement;
    const redItem = Number(redBox.getAttribute("data-item"));

    frag(container, 2, []).dispatchEvent(
      new (container.ownerDocument.defaultView as any).MouseEvent("mousedown", { bubbles: true }),
    );
    await app.idle();
    await new Promise((resolve) => setTimeout(resolve, 50));
    // both the axiom drop on the conclusion and the forward drop on the
    // premise Hum(x) are legal; the highlights mirror the server exactly
    const secondExpected = [
      ...(await api.candidates(goalId, 2, [], 1)).map((c) => ({ item: 1, path: c.path })),
      ...(await api.candidates(goalId, 2, [], redItem)).map((c) => ({
        item: redItem,
        path: c.path,
      })),
    ];
    expect(app.highlighted()).toEqual(secondExpected);
    expect(app.highlighted()).toContainEqual({ item: redItem, path: [] });

    frag(container, redItem, []).dispatchEvent(
      new (container.ownerDocument.defaultView as any).MouseEvent("mouseup", { bubbles: true }),
    );
    await app.idle();

    expect(app.isSolved()).toBe(true);
    expect(container.querySelector(".qed-banner")?.textContent).toBe("QED");
    expect(goalId).toBeGreaterThan(0);
  });

  it("keeps hypotheses on the left and the conclusion on the right", async () => {
    const { app, container } = makeApp();
    await app.start(ARISTOTLE);
    const panel = container.querySelector(".goal-panel");
    const regions = Array.from(panel?.children ?? []).map((el) => el.className);
    expect(regions).toEqual(["hypotheses", "conclusion"]);
  });
});

describe("refusals and clicks", () => {
  it("shows a refusal tooltip for the cyclic quantifier drop", async () => {
    const { app, container } = makeApp();
    await app.start(CYCLIC);

    await app.beginDrag({ goal: 1, item: 1, path: [0, 0] });
    expect(app.highlighted()).toEqual([]); // nothing legal to highlight

    await app.drop({ goal: 1, item: 2, path: [0, 0] });
    await app.idle();

    const tooltip = app.tooltipText();
    expect(tooltip).toContain("cycle");
    // the state is unchanged: still one goal, original conclusion
    const red = container.querySelector(".item.red .item-text");
    expect(red?.textContent).toBe("exists y'. forall x'. R(x',y')");
  });

  it("click actions destruct connectives; +hyp opens a subgoal tab", async () => {
    const { app, container } = makeApp();
    await app.start("hyp A /\\ B\ngoal B /\\ A\n");

    // clicking the red conjunction splits the goal into two tabs
    app.clickNode({ goal: 1, item: 2, path: [] }, false);
    await app.idle();
    expect(container.querySelectorAll(".tab").length).toBe(2);

    // a no-op click is ignored silently
    app.clickNode({ goal: app.activeGoal(), item: 1, path: [0] }, false);
    await app.idle();
    expect(app.tooltipText()).toBeNull();

    // +hyp prompts for a statement and adds a subgoal
    app.prompts.hyp = () => "A";
    (container.querySelector(".btn-add-hyp") as HTMLElement).click();
    await app.idle();
    expect(container.querySelectorAll(".tab").length).toBe(3);
  });

  it("renders green objects below and never makes them draggable", async () => {
    const { app, container } = makeApp();
    await app.start("object h\nhyp Rich(h)\ngoal Rich(h)\n");
    const chips = Array.from(container.querySelectorAll(".objects .item.green"));
    expect(chips.map((c) => (c.querySelector(".item-text") as HTMLElement).textContent)).toEqual([
      "h",
    ]);
  });

  it("exports the replayable trace of the session", async () => {
    const { app, container } = makeApp();
    await app.start(ARISTOTLE);
    await app.post({ type: "dnd", goal: 1, src_item: 1, src_path: [0, 1],
                     dst_item: 3, dst_path: [] });
    expect(container.querySelector(".btn-export")).not.toBeNull();
    const trace = (await app.exportTrace()) as {
      problem: string;
      actions: unknown[];
      expected_goals: number;
    };
    expect(trace.problem).toBe(ARISTOTLE);
    expect(trace.actions.length).toBe(1);
    expect(trace.expected_goals).toBe(1);
  });
});
