declare global {
  interface Window {
    __ANNOTATOR_CONFIG__?: { apiBase?: string };
  }
}

/** API base resolution order: runtime config object, then the api-base
 * meta tag, then same-origin. Nothing is hardcoded at build time. */
export function resolveApiBase(win: Window, doc: Document): string {
  const runtime = win.__ANNOTATOR_CONFIG__?.apiBase;
  if (runtime !== undefined) return runtime;
  const meta = doc.querySelector('meta[name="api-base"]');
  return meta?.getAttribute("content") ?? "";
}
