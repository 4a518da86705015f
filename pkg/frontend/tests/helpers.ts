import { ApiClient, FetchLike } from "../src/api.js";
import { AnnotatorApp } from "../src/app.js";
import { StorageLike } from "../src/queue.js";

export class MemoryStorage implements StorageLike {
  private readonly map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}

/** Flush the microtask chain plus zero-delay timers. */
export function tick(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

export interface Mounted {
  app: AnnotatorApp;
  root: HTMLElement;
  storage: MemoryStorage;
  client: ApiClient;
}

export async function mount(
  fetchImpl: FetchLike,
  options: { name?: string | null } = {},
): Promise<Mounted> {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  const storage = new MemoryStorage();
  const name = options.name === undefined ? "ada" : options.name;
  if (name !== null) {
    storage.setItem("annotator.name", name);
  }
  const client = new ApiClient("", fetchImpl);
  const app = new AnnotatorApp(root, client, storage, window);
  await app.start();
  return { app, root, storage, client };
}

export function text(root: HTMLElement, selector: string): string {
  const node = root.querySelector(selector);
  return node ? (node.textContent ?? "") : "";
}

export function click(root: HTMLElement, selector: string): void {
  const node = root.querySelector<HTMLElement>(selector);
  if (!node) throw new Error(`nothing matches ${selector}`);
  node.click();
}

export function typeFeedback(root: HTMLElement, value: string): void {
  const area = root.querySelector<HTMLTextAreaElement>("#feedback");
  if (!area) throw new Error("no feedback textarea in view");
  area.value = value;
  area.dispatchEvent(new Event("input", { bubbles: true }));
}
