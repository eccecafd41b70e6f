/**
 * Minimal structural element model.
 *
 * The extension logic is written against this shape rather than the real DOM
 * so it runs identically in the browser (thin wrappers over Elements) and in
 * tests (mock chat pages built from plain objects).
 */

export interface ElementLike {
  tag: string; // lowercase tag name
  id: string;
  classes: string[];
  attributes: Record<string, string>;
  children: ElementLike[];
  parent: ElementLike | null;
  /** Own text for leaf-ish nodes; containers derive text from children. */
  text: string;
  /** Field value for input/textarea-style elements. */
  value?: string;
  /** Events dispatched onto this element, recorded for synthetic-input checks. */
  events?: string[];
}

export interface ElementInit {
  id?: string;
  classes?: string[];
  attributes?: Record<string, string>;
  text?: string;
  value?: string;
}

const FIELD_TAGS = new Set(["input", "textarea"]);

export function el(tag: string, init: ElementInit = {}, children: ElementLike[] = []): ElementLike {
  const lower = tag.toLowerCase();
  const node: ElementLike = {
    tag: lower,
    id: init.id ?? "",
    classes: init.classes ?? [],
    attributes: init.attributes ?? {},
    children,
    parent: null,
    text: init.text ?? "",
    value: init.value ?? (FIELD_TAGS.has(lower) ? "" : undefined),
    events: [],
  };
  for (const child of children) {
    child.parent = node;
  }
  return node;
}

export function* walk(root: ElementLike): Generator<ElementLike> {
  yield root;
  for (const child of root.children) {
    yield* walk(child);
  }
}

/** Visible text of an element: own text plus descendants, in tree order. */
export function innerText(node: ElementLike): string {
  let out = node.text;
  for (const child of node.children) {
    out += innerText(child);
  }
  return out;
}

export function ancestors(node: ElementLike): ElementLike[] {
  const chain: ElementLike[] = [];
  for (let cur: ElementLike | null = node; cur; cur = cur.parent) {
    chain.push(cur);
  }
  return chain;
}

/** First common ancestor of two nodes (either node may be the ancestor). */
export function commonAncestor(a: ElementLike, b: ElementLike): ElementLike | null {
  const seen = new Set(ancestors(a));
  for (const candidate of ancestors(b)) {
    if (seen.has(candidate)) {
      return candidate;
    }
  }
  return null;
}

/** Child-index path from the root, e.g. [0, 2, 1]. */
export function treePath(node: ElementLike): number[] {
  const path: number[] = [];
  for (let cur = node; cur.parent; cur = cur.parent) {
    path.unshift(cur.parent.children.indexOf(cur));
  }
  return path;
}

export function dispatch(node: ElementLike, event: string): void {
  (node.events ??= []).push(event);
}
