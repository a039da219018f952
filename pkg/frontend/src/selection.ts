import type { Layout, LayoutNode, Marked } from "./types.js";

/** Selection behaviour over the printed formula.
 *
 * Node spans exclude enclosing parentheses, member cells include them, so a
 * click on a bracket naturally selects the enclosing node. Clicking selects
 * the smallest subformula around the character; clicking inside the current
 * selection again widens it to the enclosing node; dragging across members
 * of one chain selects the contiguous run as a slice.
 */

const samePath = (a: number[], b: number[]) => a.length === b.length && a.every((x, i) => x === b[i]);

export function nodeAt(layout: Layout, path: number[]): LayoutNode | undefined {
  return layout.nodes.find((n) => samePath(n.path, path));
}

/** The character span a selection occupies, for highlighting. */
export function spanOf(layout: Layout, sel: Marked): [number, number] {
  const node = nodeAt(layout, sel.path);
  if (!node) return [0, 0];
  if (sel.slice && node.members) {
    const [s, len] = sel.slice;
    return [node.members[s][0], node.members[s + len - 1][1]];
  }
  return [node.start, node.end];
}

/** Smallest node whose span contains the offset. */
export function smallestAt(layout: Layout, offset: number): LayoutNode | undefined {
  let best: LayoutNode | undefined;
  for (const n of layout.nodes) {
    if (n.start <= offset && offset < n.end) {
      if (!best || n.end - n.start < best.end - best.start) best = n;
    }
  }
  return best;
}

/** The enclosing selection: a slice widens to its chain, a node to its parent. */
export function widen(layout: Layout, sel: Marked): Marked {
  if (sel.slice) return { path: sel.path };
  if (sel.path.length === 0) return sel;
  return { path: sel.path.slice(0, -1) };
}

export function selectionForClick(layout: Layout, offset: number, prev: Marked | null): Marked | null {
  const hit = smallestAt(layout, offset);
  if (!hit) return prev;
  if (prev) {
    const [s, e] = spanOf(layout, prev);
    if (s <= offset && offset < e) {
      const widened = widen(layout, prev);
      if (!samePath(widened.path, prev.path) || prev.slice) return widened;
    }
  }
  return { path: hit.path };
}

/** Drag across member cells of one chain; falls back to the smallest node
 * covering the whole range when the endpoints span different chains. */
export function selectionForDrag(layout: Layout, a: number, b: number): Marked | null {
  const lo = Math.min(a, b);
  const hi = Math.max(a, b);
  if (lo === hi) return selectionForClick(layout, lo, null);

  let best: Marked | null = null;
  let bestWidth = Infinity;
  for (const n of layout.nodes) {
    if (!n.members || n.start > lo || hi >= n.end) continue;
    const first = n.members.findIndex(([, e]) => lo < e);
    const last = n.members.findIndex(([s, e]) => s <= hi && hi < e);
    if (first < 0 || last < 0 || last < first) continue;
    const width = n.members[last][1] - n.members[first][0];
    if (width >= bestWidth) continue;
    bestWidth = width;
    if (first === 0 && last === n.members.length - 1) best = { path: n.path };
    else if (first === last) best = { path: [...n.path, first] };
    else best = { path: n.path, slice: [first, last - first + 1] };
  }
  if (best) return best;
  const node = layout.nodes
    .filter((n) => n.start <= lo && hi < n.end)
    .sort((x, y) => x.end - x.start - (y.end - y.start))[0];
  return node ? { path: node.path } : null;
}

/** Every whole-node path, for the totality check: each must be reachable. */
export function allPaths(layout: Layout): number[][] {
  return layout.nodes.map((n) => n.path);
}
