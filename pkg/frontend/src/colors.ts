/** Egocentric ownership colors for vertices. */

export type Ownership = "available" | "mine" | "partner" | "shared";

export const OWNERSHIP_CSS: Record<Ownership, string> = {
  available: "#a8d4e6", // light blue: free for anyone
  mine: "#10308f", // dark blue: my selection
  partner: "rgb(255,59,47)", // red: partner's selection
  shared: "rgb(175,82,221)", // purple: selected by both
};

export const TARGET_GHOST_CSS = "rgba(240, 226, 140, 0.55)"; // light yellow
export const EDGE_CSS = "#666a73";

/**
 * Ownership of one vertex as seen by `viewer`, derived purely from the
 * snapshot's selection lists.
 */
export function ownership(
  vertex: number,
  selections: Record<string, number[]>,
  viewer: 0 | 1,
): Ownership {
  const mine = selections[String(viewer)]?.includes(vertex) ?? false;
  const theirs = selections[String(1 - viewer)]?.includes(vertex) ?? false;
  if (mine && theirs) return "shared";
  if (mine) return "mine";
  if (theirs) return "partner";
  return "available";
}
