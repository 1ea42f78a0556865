import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest'

import {
  ApiError,
  fetchCount,
  fetchGraph,
  postDecision,
  resetFetchCount,
} from '../src/api'
import { createMockServer } from './mockServer'

describe('api client', () => {
  let server: ReturnType<typeof createMockServer>

  beforeEach(() => {
    server = createMockServer()
    server.install()
    resetFetchCount()
  })

  afterEach(() => {
    vi.restoreAllMocks()
  })

  it('deduplicates concurrent identical requests', async () => {
    const [a, b] = await Promise.all([
      fetchGraph('QBS-1', 3),
      fetchGraph('QBS-1', 3),
    ])
    expect(fetchCount).toBe(1)
    expect(a).toEqual(b)
  })

  it('does not share requests across different params', async () => {
    await Promise.all([fetchGraph('QBS-1', 2), fetchGraph('QBS-1', 3)])
    expect(fetchCount).toBe(2)
  })

  it('refetches once a request settles', async () => {
    await fetchGraph('QBS-1', 3)
    await fetchGraph('QBS-1', 3)
    expect(fetchCount).toBe(2)
  })

  it('throws ApiError with the server status', async () => {
    await expect(
      postDecision({ from: 'QBS-1', to: 'QBS-7', verdict: 'accept' })
    ).rejects.toMatchObject({ status: 400 })
    await expect(fetchGraph('QBS-1', 3)).resolves.toBeTruthy()
    ;(globalThis as { fetch: unknown }).fetch = async () => ({
      ok: false,
      status: 404,
      statusText: 'not found',
      text: async () => 'missing',
      json: async () => ({}),
    })
    const err = await fetchGraph('NOPE-1', 3).catch((e) => e)
    expect(err).toBeInstanceOf(ApiError)
    expect(err.status).toBe(404)
  })

  it('posts decisions with the documented body', async () => {
    await postDecision({
      from: 'QBS-1',
      to: 'QBS-7',
      verdict: 'accept',
      dep_type: 'requires',
    })
    expect(server.decisions).toEqual([
      { from: 'QBS-1', to: 'QBS-7', verdict: 'accept', dep_type: 'requires' },
    ])
  })
})
