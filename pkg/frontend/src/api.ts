/**
 * Thin typed client for the query service.
 *
 * Concurrent GETs to the same endpoint+params share one in-flight request;
 * the promise is dropped from the table once settled so later calls refetch.
 */
import type {
  ConsistencyDto,
  DecisionRequest,
  ProposalsResponse,
  SubgraphDto,
} from './types'

export class ApiError extends Error {
  status: number

  constructor(status: number, message: string) {
    super(message)
    this.status = status
  }
}

const inflight = new Map<string, Promise<unknown>>()

/** Test hook: how many requests actually hit fetch (dedup observability). */
export let fetchCount = 0

export function resetFetchCount(): void {
  fetchCount = 0
}

async function request<T>(url: string): Promise<T> {
  const pending = inflight.get(url)
  if (pending) return pending as Promise<T>
  fetchCount += 1
  const p = fetch(url)
    .then(async (resp) => {
      if (!resp.ok) {
        const body = await resp.text()
        throw new ApiError(resp.status, body || resp.statusText)
      }
      return resp.json() as Promise<T>
    })
    .finally(() => inflight.delete(url))
  inflight.set(url, p)
  return p as Promise<T>
}

export function fetchGraph(
  center: string,
  depth: number,
  includeProposed = true
): Promise<SubgraphDto> {
  const params = new URLSearchParams({
    depth: String(depth),
    include_proposed: String(includeProposed),
  })
  return request(`/api/graph/${encodeURIComponent(center)}?${params}`)
}

export function fetchProposals(center: string): Promise<ProposalsResponse> {
  return request(`/api/proposals/${encodeURIComponent(center)}`)
}

export function fetchConsistency(
  center: string,
  depth: number,
  diagnose = true
): Promise<ConsistencyDto> {
  const params = new URLSearchParams({
    depth: String(depth),
    diagnose: String(diagnose),
  })
  return request(`/api/consistency/${encodeURIComponent(center)}?${params}`)
}

export async function postDecision(body: DecisionRequest): Promise<void> {
  const resp = await fetch('/api/decisions', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(body),
  })
  if (!resp.ok) {
    const text = await resp.text()
    throw new ApiError(resp.status, text || resp.statusText)
  }
}
