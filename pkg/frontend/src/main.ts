/** Browser entry point. Reads connection settings from the query string:
 *
 *   index.html?api=http://127.0.0.1:8011&annotator=annotator1&pair=doc-17&token=...
 *
 * `api` defaults to the page origin, `annotator` to "anonymous".
 */

import { bootstrap } from "./app.js";

function start(): void {
  const root = document.getElementById("workbench");
  if (root === null) return;
  const params = new URLSearchParams(window.location.search);
  const config = {
    apiBase: params.get("api") ?? window.location.origin,
    annotatorId: params.get("annotator") ?? "anonymous",
    token: params.get("token") ?? undefined,
  };
  const pair = params.get("pair") ?? undefined;
  void bootstrap(root, config, pair).catch((err: unknown) => {
    root.textContent = `failed to start: ${err instanceof Error ? err.message : String(err)}`;
  });
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", start);
} else {
  start();
}
