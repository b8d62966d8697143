// Layered (rank-based) DAG layout, the one piece of client-side computation.
// Ranks follow the longest path from the roots (the same depth convention the
// server uses for depth-limited views), horizontal order is settled with a
// couple of barycenter sweeps.

export interface LayoutEdge {
  from: string;
  to: string;
}

export interface NodePosition {
  x: number;
  y: number;
  layer: number;
}

export interface Layout {
  positions: Map<string, NodePosition>;
  width: number;
  height: number;
  layers: string[][];
}

export const NODE_WIDTH = 170;
export const NODE_HEIGHT = 44;
export const H_GAP = 28;
export const V_GAP = 70;

export function computeLayout(nodeIds: string[], edges: LayoutEdge[]): Layout {
  const ids = [...nodeIds];
  const known = new Set(ids);
  const children = new Map<string, string[]>(ids.map((id) => [id, []]));
  const parents = new Map<string, string[]>(ids.map((id) => [id, []]));
  for (const edge of edges) {
    if (!known.has(edge.from) || !known.has(edge.to)) continue;
    children.get(edge.from)!.push(edge.to);
    parents.get(edge.to)!.push(edge.from);
  }

  // longest-path layering via Kahn's algorithm
  const layer = new Map<string, number>();
  const remaining = new Map(ids.map((id) => [id, parents.get(id)!.length]));
  const queue = ids.filter((id) => remaining.get(id) === 0).sort();
  for (const id of queue) layer.set(id, 0);
  while (queue.length) {
    const current = queue.shift()!;
    for (const child of children.get(current)!) {
      layer.set(child, Math.max(layer.get(child) ?? 0, layer.get(current)! + 1));
      remaining.set(child, remaining.get(child)! - 1);
      if (remaining.get(child) === 0) queue.push(child);
    }
  }
  // nodes on cycles never drain; park them on layer 0 rather than fail
  for (const id of ids) if (!layer.has(id)) layer.set(id, 0);

  const layerCount = Math.max(...[...layer.values()], 0) + 1;
  const layers: string[][] = Array.from({ length: layerCount }, () => []);
  for (const id of [...ids].sort()) layers[layer.get(id)!].push(id);

  // two barycenter sweeps (down by parents, up by children), id as tie-break
  const index = new Map<string, number>();
  const reindex = () => {
    for (const row of layers) row.forEach((id, i) => index.set(id, i));
  };
  reindex();
  const barycenter = (id: string, neighbors: string[]) => {
    const positions = neighbors.filter((n) => index.has(n)).map((n) => index.get(n)!);
    return positions.length
      ? positions.reduce((a, b) => a + b, 0) / positions.length
      : index.get(id)!;
  };
  for (const pass of [0, 1]) {
    const rows = pass === 0 ? layers.slice(1) : layers.slice(0, -1).reverse();
    for (const row of rows) {
      const neighborsOf = (id: string) =>
        pass === 0 ? parents.get(id)! : children.get(id)!;
      row.sort((a, b) => {
        const delta = barycenter(a, neighborsOf(a)) - barycenter(b, neighborsOf(b));
        return delta !== 0 ? delta : a < b ? -1 : 1;
      });
      reindex();
    }
  }

  const widest = Math.max(...layers.map((row) => row.length), 1);
  const width = widest * (NODE_WIDTH + H_GAP) + H_GAP;
  const positions = new Map<string, NodePosition>();
  layers.forEach((row, rank) => {
    const rowWidth = row.length * (NODE_WIDTH + H_GAP);
    const offset = (width - rowWidth) / 2;
    row.forEach((id, i) => {
      positions.set(id, {
        x: offset + i * (NODE_WIDTH + H_GAP) + H_GAP / 2,
        y: rank * (NODE_HEIGHT + V_GAP) + V_GAP / 2,
        layer: rank,
      });
    });
  });
  return {
    positions,
    width,
    height: layerCount * (NODE_HEIGHT + V_GAP),
    layers,
  };
}
