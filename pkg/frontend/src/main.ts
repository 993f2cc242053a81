import { App } from "./app.js";

const DEFAULT_PROBLEM = `hyp forall x. Hum(x) => Mort(x)
hyp Hum(Socr)
goal Mort(Socr)
`;

function boot(): void {
  const container = document.getElementById("proof") as HTMLElement;
  const problemBox = document.getElementById("problem") as HTMLTextAreaElement;
  const startButton = document.getElementById("start") as HTMLButtonElement;
  problemBox.value = DEFAULT_PROBLEM;

  const app = new App(container, "");
  app.prompts.hyp = () => window.prompt("Statement of the conjecture:");
  app.prompts.expr = () => {
    const name = window.prompt("Name of the object:");
    if (!name) return null;
    const term = window.prompt("Defining expression:");
    if (!term) return null;
    return [name, term];
  };

  startButton.addEventListener("click", () => {
    void app.start(problemBox.value);
  });
  // a drop outside any node cancels the drag
  document.addEventListener("mouseup", (event) => {
    const target = event.target as Element | null;
    if (!target || !target.classList || !target.classList.contains("frag")) {
      app.cancelDrag();
    }
  });
}

document.addEventListener("DOMContentLoaded", boot);
