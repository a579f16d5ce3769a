// Browser entry point: task picker + session controls around PlayApp.

import { PlayApp, fetchTasks } from "./app.js";
import { Mode, TaskDescriptor } from "./protocol.js";

async function boot(): Promise<void> {
  const app = new PlayApp(document);
  const taskSelect = document.getElementById("task-select") as HTMLSelectElement;
  const modeSelect = document.getElementById("mode-select") as HTMLSelectElement;
  const seedInput = document.getElementById("seed-input") as HTMLInputElement;
  const startButton = document.getElementById("start-button") as HTMLButtonElement;
  const resignButton = document.getElementById("resign-button") as HTMLButtonElement;

  let tasks: TaskDescriptor[] = [];
  try {
    tasks = await fetchTasks("");
  } catch {
    document.getElementById("status")!.textContent = "play service unreachable";
    return;
  }
  for (const task of tasks) {
    const option = document.createElement("option");
    option.value = task.id ?? "";
    option.textContent = task.id ?? "?";
    taskSelect.appendChild(option);
  }

  startButton.addEventListener("click", async () => {
    const task = tasks.find((t) => t.id === taskSelect.value) ?? tasks[0];
    const mode = modeSelect.value as Mode;
    const seed = seedInput.value ? Number(seedInput.value) : undefined;
    await app.start(task, mode, seed);
  });
  resignButton.addEventListener("click", () => app.resign());
}

boot();
