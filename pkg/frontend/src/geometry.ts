/** Shared-scale viewport math for the two comparison panels. */

export type Ring = number[][];

export interface ViewBox {
  x: number;
  y: number;
  width: number;
  height: number;
}

/**
 * One viewBox covering every polygon of the comparison, with padding.
 * Both panels use it unchanged, so A and B share scale and alignment and
 * size differences stay honest. Y is negated for SVG's downward axis.
 */
export function sharedViewBox(polygons: Ring[], padFraction = 0.08): ViewBox {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const ring of polygons) {
    for (const [x, y] of ring) {
      xs.push(x);
      ys.push(-y);
    }
  }
  if (xs.length === 0) {
    return { x: 0, y: 0, width: 1, height: 1 };
  }
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const pad = Math.max(maxX - minX, maxY - minY, 1) * padFraction;
  return {
    x: minX - pad,
    y: minY - pad,
    width: maxX - minX + 2 * pad,
    height: maxY - minY + 2 * pad,
  };
}

export function viewBoxAttr(vb: ViewBox): string {
  return `${vb.x} ${vb.y} ${vb.width} ${vb.height}`;
}

/** SVG points string (y negated to match sharedViewBox). */
export function ringPoints(ring: Ring): string {
  return ring.map(([x, y]) => `${x},${-y}`).join(" ");
}

export function isDegenerate(ring: Ring | undefined | null): boolean {
  return !ring || ring.length < 3;
}
