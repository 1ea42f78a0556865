/**
 * View state and its URL-hash encoding.
 *
 * The whole view is reconstructible from the hash, so any state is a
 * shareable link: `#/QTBUG-123?depth=3&types=bug,epic&statuses=Open&tab=proposals`.
 */

export type Tab = 'details' | 'proposals' | 'consistency'

export interface ViewState {
  center: string
  depth: number
  typeFilters: string[]
  statusFilters: string[]
  tab: Tab
}

export const MIN_DEPTH = 1
export const MAX_DEPTH = 5

export function clampDepth(depth: number): number {
  if (!Number.isFinite(depth)) return MAX_DEPTH
  return Math.min(MAX_DEPTH, Math.max(MIN_DEPTH, Math.round(depth)))
}

export function defaultState(center = ''): ViewState {
  return {
    center,
    depth: 3,
    typeFilters: [],
    statusFilters: [],
    tab: 'details',
  }
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams()
  params.set('depth', String(clampDepth(state.depth)))
  if (state.typeFilters.length) params.set('types', state.typeFilters.join(','))
  if (state.statusFilters.length)
    params.set('statuses', state.statusFilters.join(','))
  if (state.tab !== 'details') params.set('tab', state.tab)
  const query = params.toString()
  return `#/${encodeURIComponent(state.center)}${query ? '?' + query : ''}`
}

export function decodeState(hash: string): ViewState | null {
  const m = /^#\/([^?]*)(?:\?(.*))?$/.exec(hash)
  if (!m || !m[1]) return null
  const center = decodeURIComponent(m[1])
  const params = new URLSearchParams(m[2] ?? '')
  const state = defaultState(center)
  const depth = params.get('depth')
  if (depth !== null) state.depth = clampDepth(Number(depth))
  const types = params.get('types')
  if (types) state.typeFilters = types.split(',').filter(Boolean)
  const statuses = params.get('statuses')
  if (statuses) state.statusFilters = statuses.split(',').filter(Boolean)
  const tab = params.get('tab')
  if (tab === 'proposals' || tab === 'consistency') state.tab = tab
  return state
}
