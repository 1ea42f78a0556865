/**
 * Node placement for the subgraph view.
 *
 * The default layout puts the center issue in the middle and every other
 * node on a concentric ring whose index is its server-reported hop distance.
 * A simple deterministic force layout is available as a toggle.
 */
import type { GraphEdge, GraphNode } from './types'

export interface Point {
  x: number
  y: number
  /** ring index the node was placed on (its hop distance; 0 = center) */
  ring: number
}

export interface LayoutOptions {
  width: number
  height: number
  ringSpacing?: number
}

export type LayoutMode = 'rings' | 'force'

export function ringLayout(
  nodes: GraphNode[],
  options: LayoutOptions
): Map<string, Point> {
  const positions = new Map<string, Point>()
  const cx = options.width / 2
  const cy = options.height / 2
  if (nodes.length === 0) return positions

  const maxRing = Math.max(...nodes.map((n) => n.distance))
  const spacing =
    options.ringSpacing ??
    Math.max(60, Math.min(options.width, options.height) / 2 / Math.max(1, maxRing) - 10)

  const rings = new Map<number, GraphNode[]>()
  for (const node of nodes) {
    const bucket = rings.get(node.distance)
    if (bucket) bucket.push(node)
    else rings.set(node.distance, [node])
  }
  for (const [ring, members] of rings) {
    members.sort((a, b) => (a.key < b.key ? -1 : a.key > b.key ? 1 : 0))
    if (ring === 0) {
      for (const node of members) positions.set(node.key, { x: cx, y: cy, ring: 0 })
      continue
    }
    const radius = ring * spacing
    members.forEach((node, i) => {
      const angle = (2 * Math.PI * i) / members.length - Math.PI / 2
      positions.set(node.key, {
        x: cx + radius * Math.cos(angle),
        y: cy + radius * Math.sin(angle),
        ring,
      })
    })
  }
  return positions
}

/**
 * Deterministic spring relaxation seeded from the ring layout. Keeps the
 * ring index on each point so callers can still report it.
 */
export function forceLayout(
  nodes: GraphNode[],
  edges: GraphEdge[],
  options: LayoutOptions,
  iterations = 60
): Map<string, Point> {
  const positions = ringLayout(nodes, options)
  if (nodes.length < 2) return positions
  const keys = nodes.map((n) => n.key)
  const ideal = Math.max(
    40,
    Math.min(options.width, options.height) / Math.sqrt(nodes.length) / 1.5
  )
  for (let it = 0; it < iterations; it++) {
    const forces = new Map<string, { fx: number; fy: number }>()
    for (const key of keys) forces.set(key, { fx: 0, fy: 0 })
    for (let i = 0; i < keys.length; i++) {
      for (let j = i + 1; j < keys.length; j++) {
        const a = positions.get(keys[i])!
        const b = positions.get(keys[j])!
        let dx = a.x - b.x
        let dy = a.y - b.y
        let dist = Math.hypot(dx, dy)
        if (dist < 1) {
          dx = 1
          dy = 0
          dist = 1
        }
        const repulse = (ideal * ideal) / dist / dist
        forces.get(keys[i])!.fx += dx * repulse
        forces.get(keys[i])!.fy += dy * repulse
        forces.get(keys[j])!.fx -= dx * repulse
        forces.get(keys[j])!.fy -= dy * repulse
      }
    }
    for (const edge of edges) {
      const a = positions.get(edge.from)
      const b = positions.get(edge.to)
      if (!a || !b) continue
      const dx = b.x - a.x
      const dy = b.y - a.y
      const dist = Math.max(1, Math.hypot(dx, dy))
      const pull = (dist - ideal) / dist / 20
      a.x += dx * pull
      a.y += dy * pull
      b.x -= dx * pull
      b.y -= dy * pull
    }
    for (const key of keys) {
      const p = positions.get(key)!
      const f = forces.get(key)!
      p.x += Math.max(-5, Math.min(5, f.fx))
      p.y += Math.max(-5, Math.min(5, f.fy))
    }
  }
  return positions
}

export function computeLayout(
  mode: LayoutMode,
  nodes: GraphNode[],
  edges: GraphEdge[],
  options: LayoutOptions
): Map<string, Point> {
  return mode === 'force'
    ? forceLayout(nodes, edges, options)
    : ringLayout(nodes, options)
}
