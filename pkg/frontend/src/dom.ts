// DOM construction helpers. The one rule that matters: every numeric value
// shown to the operator is rendered through num(), which re-displays an API
// number verbatim (String(x), no arithmetic, no rounding) and tags the
// element so tests can sweep the page for untraceable numbers.

export type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node;
}

/** Verbatim numeric display: the only way numbers reach the page. */
export function num(value: number, attrs: Record<string, string> = {}): HTMLElement {
  return el("span", { ...attrs, class: "num", "data-num": "" }, String(value));
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Probability bar; the magnitude drives styling only, never visible text. */
export function bar(fraction: number, cssClass: string): HTMLElement {
  const outer = el("div", { class: `bar ${cssClass}` });
  const fill = el("div", { class: "bar-fill" });
  fill.style.width = `${fraction * 100}%`;
  outer.append(fill);
  return outer;
}

export function option(value: string, label?: string): HTMLOptionElement {
  return el("option", { value }, label ?? value);
}
