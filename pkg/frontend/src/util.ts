/** Small DOM and async helpers shared by the panels. */

const SVG_NS = "http://www.w3.org/2000/svg";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}

/**
 * Tracks in-flight panel work so tests (and the URL sync) can await a
 * quiescent UI: `await panel.pending.settle()`.
 */
export class Pending {
  private tasks = new Set<Promise<unknown>>();

  add<T>(task: Promise<T>): Promise<T> {
    this.tasks.add(task);
    task.catch(() => {}).finally(() => this.tasks.delete(task));
    return task;
  }

  async settle(): Promise<void> {
    while (this.tasks.size > 0) {
      await Promise.allSettled([...this.tasks]);
    }
  }
}

export function isAbortError(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}
