import { describe, expect, it } from 'vitest'

import { clampDepth, decodeState, defaultState, encodeState } from '../src/state'

describe('view state url encoding', () => {
  it('round-trips every field through the hash', () => {
    const state = {
      center: 'QTBUG-123',
      depth: 4,
      typeFilters: ['bug', 'epic'],
      statusFilters: ['Open'],
      tab: 'proposals' as const,
    }
    const decoded = decodeState(encodeState(state))
    expect(decoded).toEqual(state)
  })

  it('defaults omitted params', () => {
    const decoded = decodeState('#/QBS-1')
    expect(decoded).toEqual(defaultState('QBS-1'))
  })

  it('rejects hashes without a center', () => {
    expect(decodeState('')).toBeNull()
    expect(decodeState('#/')).toBeNull()
    expect(decodeState('#other')).toBeNull()
  })

  it('clamps depth into [1, 5]', () => {
    expect(clampDepth(0)).toBe(1)
    expect(clampDepth(9)).toBe(5)
    expect(clampDepth(3)).toBe(3)
    expect(clampDepth(Number.NaN)).toBe(5)
    expect(decodeState('#/A-1?depth=99')!.depth).toBe(5)
  })

  it('encodes url-hostile keys safely', () => {
    const state = defaultState('QBS-1')
    state.center = 'QBS-1'
    const hash = encodeState(state)
    expect(hash.startsWith('#/QBS-1')).toBe(true)
  })
})
