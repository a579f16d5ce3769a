// Shared DOM scaffold mirroring index.html's element ids.

export function mountAppDom(): void {
  document.body.innerHTML = `
    <div id="app">
      <section id="hud"></section>
      <div id="window-grid" class="grid"></div>
      <div id="design-grid" class="grid"></div>
      <div id="banner"></div>
      <div id="status"></div>
      <div id="legend"></div>
    </div>
  `;
}

export async function until(
  predicate: () => boolean,
  timeoutMs = 10_000,
  label = "condition",
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) {
      throw new Error(`timed out waiting for ${label}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 5));
  }
}
