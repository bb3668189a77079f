// Entry point: read connection parameters from the URL, boot the console.
//   index.html?api=http://127.0.0.1:8000&scenario=gas-compressor&session=shift-a

import { ApiClient } from "./api.js";
import { OperatorConsole } from "./console.js";
import { el } from "./dom.js";

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const api = params.get("api") ?? "http://127.0.0.1:8000";
  const scenario = params.get("scenario") ?? "gas-compressor";
  const session = params.get("session") ?? undefined;

  const mount = document.getElementById("app");
  if (!mount) throw new Error("missing #app mount point");

  const console_ = new OperatorConsole(new ApiClient(api));
  mount.append(console_.root);
  console_.idle = console_.open(scenario, session).catch((err: unknown) => {
    mount.append(
      el("p", { class: "error-bar" }, err instanceof Error ? err.message : String(err)),
    );
  });
}

boot();
