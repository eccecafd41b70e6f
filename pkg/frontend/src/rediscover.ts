/**
 * Heuristic rediscovery of a chat page's input/output elements after the
 * page's markup changes.
 *
 * Candidates are scored on tag name (1), id (3), class overlap (2 x Jaccard),
 * and tree path (2); the best candidate at or above the threshold (3) is
 * adopted. Equal scores break by document order. The weights are declared
 * here and in the settings, tuned on the mutation corpus in the tests.
 */

import { ElementLike, treePath, walk } from "./dom.js";

export interface ElementDescriptor {
  tag: string;
  id: string;
  classes: string[];
  path: number[];
}

export const SCORE_THRESHOLD = 3;

export function describe(node: ElementLike): ElementDescriptor {
  return { tag: node.tag, id: node.id, classes: [...node.classes], path: treePath(node) };
}

export function jaccard(a: string[], b: string[]): number {
  if (a.length === 0 && b.length === 0) {
    return 0;
  }
  const setA = new Set(a);
  const setB = new Set(b);
  let intersection = 0;
  for (const item of setA) {
    if (setB.has(item)) {
      intersection += 1;
    }
  }
  const union = new Set([...a, ...b]).size;
  return union === 0 ? 0 : intersection / union;
}

export function score(candidate: ElementLike, descriptor: ElementDescriptor): number {
  let total = 0;
  if (candidate.tag === descriptor.tag) {
    total += 1;
  }
  if (descriptor.id && candidate.id === descriptor.id) {
    total += 3;
  }
  total += 2 * jaccard(candidate.classes, descriptor.classes);
  if (pathsEqual(treePath(candidate), descriptor.path)) {
    total += 2;
  }
  return total;
}

function pathsEqual(a: number[], b: number[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

/** Resolve a descriptor exactly: same id when given, else same path+tag. */
export function resolveDescriptor(root: ElementLike, descriptor: ElementDescriptor): ElementLike | null {
  for (const node of walk(root)) {
    if (descriptor.id && node.id === descriptor.id && node.tag === descriptor.tag) {
      return node;
    }
  }
  for (const node of walk(root)) {
    if (node.tag === descriptor.tag && pathsEqual(treePath(node), descriptor.path)) {
      return node;
    }
  }
  return null;
}

export interface RediscoveryResult {
  element: ElementLike | null;
  score: number;
}

/** Best-scoring candidate at or above the threshold; document order breaks ties. */
export function rediscover(root: ElementLike, descriptor: ElementDescriptor): RediscoveryResult {
  let best: ElementLike | null = null;
  let bestScore = -1;
  for (const node of walk(root)) {
    const s = score(node, descriptor);
    if (s > bestScore) {
      best = node;
      bestScore = s;
    }
  }
  if (best !== null && bestScore >= SCORE_THRESHOLD) {
    return { element: best, score: bestScore };
  }
  return { element: null, score: Math.max(bestScore, 0) };
}
