import { describe, expect, it } from 'vitest'

import { forceLayout, ringLayout } from '../src/layout'
import type { GraphNode } from '../src/types'

function node(key: string, distance: number): GraphNode {
  return {
    key,
    title: key,
    type: 'bug',
    status: 'Open',
    priority: null,
    release: null,
    distance,
  }
}

const OPTS = { width: 800, height: 600, ringSpacing: 100 }

describe('ring layout', () => {
  it('places the center in the middle', () => {
    const positions = ringLayout([node('A-1', 0)], OPTS)
    expect(positions.get('A-1')).toEqual({ x: 400, y: 300, ring: 0 })
  })

  it('assigns every node the ring of its hop distance', () => {
    const nodes = [
      node('A-1', 0),
      node('A-2', 1),
      node('A-3', 1),
      node('A-4', 2),
      node('A-5', 3),
      node('A-6', 3),
    ]
    const positions = ringLayout(nodes, OPTS)
    for (const n of nodes) {
      const p = positions.get(n.key)!
      expect(p.ring).toBe(n.distance)
      const radius = Math.hypot(p.x - 400, p.y - 300)
      expect(radius).toBeCloseTo(n.distance * 100, 6)
    }
  })

  it('spreads ring members at distinct angles', () => {
    const nodes = [node('A-1', 0), node('B-1', 1), node('B-2', 1), node('B-3', 1)]
    const positions = ringLayout(nodes, OPTS)
    const points = ['B-1', 'B-2', 'B-3'].map((k) => positions.get(k)!)
    const unique = new Set(points.map((p) => `${p.x.toFixed(3)},${p.y.toFixed(3)}`))
    expect(unique.size).toBe(3)
  })

  it('handles an empty node list', () => {
    expect(ringLayout([], OPTS).size).toBe(0)
  })
})

describe('force layout', () => {
  it('keeps the ring annotation and stays deterministic', () => {
    const nodes = [node('A-1', 0), node('A-2', 1), node('A-3', 2)]
    const edges = [
      { from: 'A-1', to: 'A-2', dep_type: 'relates', status: 'accepted', score: 1, proposed: false },
      { from: 'A-2', to: 'A-3', dep_type: 'relates', status: 'accepted', score: 1, proposed: false },
    ]
    const first = forceLayout(nodes, edges, OPTS)
    const second = forceLayout(nodes, edges, OPTS)
    for (const n of nodes) {
      expect(first.get(n.key)!.ring).toBe(n.distance)
      expect(first.get(n.key)).toEqual(second.get(n.key))
    }
  })
})
