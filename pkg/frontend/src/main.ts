import { ApiClient } from "./api.js";
import { AnnotatorApp } from "./app.js";
import { resolveApiBase } from "./config.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}

const client = new ApiClient(resolveApiBase(window, document), (url, init) =>
  fetch(url, init),
);
const app = new AnnotatorApp(root, client, window.localStorage, window);
void app.start();
