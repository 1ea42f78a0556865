/**
 * Application shell: URL-hash driven view over one centered issue.
 */
import { fetchConsistency, fetchGraph, fetchProposals } from './api'
import { renderGraph } from './graphview'
import type { LayoutMode } from './layout'
import { renderConsistency, renderDetails, renderProposals } from './panels'
import {
  MAX_DEPTH,
  MIN_DEPTH,
  Tab,
  ViewState,
  decodeState,
  defaultState,
  encodeState,
} from './state'
import type { SubgraphDto } from './types'

export interface App {
  root: HTMLElement
  state: ViewState
  load: () => Promise<void>
  setTab: (tab: Tab) => void
}

export function createApp(root: HTMLElement): App {
  root.innerHTML = `
    <header class="topbar">
      <form class="lookup">
        <input name="center" placeholder="ISSUE-123" />
        <label>depth
          <select name="depth">${depthOptions()}</select>
        </label>
        <label>layout
          <select name="layout">
            <option value="rings">rings</option>
            <option value="force">force</option>
          </select>
        </label>
        <button type="submit">Load</button>
      </form>
      <div class="toast" hidden></div>
    </header>
    <main class="split">
      <section class="graph-pane"></section>
      <aside class="side-pane">
        <nav class="tabs">
          <button data-tab="details">Details</button>
          <button data-tab="proposals">Proposals</button>
          <button data-tab="consistency">Consistency</button>
        </nav>
        <section class="tab-body"></section>
      </aside>
    </main>
  `
  const graphPane = root.querySelector('.graph-pane') as HTMLElement
  const tabBody = root.querySelector('.tab-body') as HTMLElement
  const toast = root.querySelector('.toast') as HTMLElement
  const form = root.querySelector('.lookup') as HTMLFormElement
  const centerInput = form.querySelector('input[name=center]') as HTMLInputElement
  const depthSelect = form.querySelector('select[name=depth]') as HTMLSelectElement
  const layoutSelect = form.querySelector('select[name=layout]') as HTMLSelectElement

  let state = decodeState(location.hash) ?? defaultState()
  let layoutMode: LayoutMode = 'rings'
  let currentDto: SubgraphDto | null = null
  const disregarded = new Set<string>()

  const showError = (message: string, retry: () => void) => {
    toast.textContent = ''
    toast.hidden = false
    toast.appendChild(document.createTextNode(message + ' '))
    const retryBtn = document.createElement('button')
    retryBtn.textContent = 'Retry'
    retryBtn.addEventListener('click', () => {
      toast.hidden = true
      retry()
    })
    toast.appendChild(retryBtn)
  }

  const pushState = () => {
    const encoded = encodeState(state)
    if (location.hash !== encoded) location.hash = encoded
  }

  const drawGraph = () => {
    if (!currentDto) return
    renderGraph(graphPane, currentDto, state.typeFilters, state.statusFilters, {
      layoutMode,
      onSelect: (key) => {
        if (state.tab === 'details') renderTab()
        const node = currentDto?.nodes.find((n) => n.key === key) ?? null
        if (state.tab === 'details') renderDetails(tabBody, node)
      },
    })
  }

  const renderTab = () => {
    for (const btn of root.querySelectorAll<HTMLButtonElement>('.tabs button')) {
      btn.classList.toggle('active', btn.dataset.tab === state.tab)
    }
    if (!state.center) {
      tabBody.textContent = 'Load an issue first.'
      return
    }
    if (state.tab === 'details') {
      const node =
        currentDto?.nodes.find((n) => n.key === state.center) ?? null
      renderDetails(tabBody, node)
    } else if (state.tab === 'proposals') {
      fetchProposals(state.center)
        .then((resp) =>
          renderProposals(tabBody, state.center, resp.proposals, disregarded, {
            onDecided: () => void load(),
            onError: showError,
          })
        )
        .catch((err) => showError(String(err?.message ?? err), renderTab))
    } else {
      fetchConsistency(state.center, state.depth)
        .then((result) => renderConsistency(tabBody, result))
        .catch((err) => showError(String(err?.message ?? err), renderTab))
    }
  }

  const load = async () => {
    if (!state.center) return
    centerInput.value = state.center
    depthSelect.value = String(state.depth)
    try {
      currentDto = await fetchGraph(state.center, state.depth, true)
    } catch (err) {
      showError(String((err as Error)?.message ?? err), () => void load())
      return
    }
    drawGraph()
    renderTab()
  }

  form.addEventListener('submit', (ev) => {
    ev.preventDefault()
    const center = centerInput.value.trim()
    if (!center) return
    state = { ...state, center, depth: Number(depthSelect.value) }
    pushState()
    void load()
  })
  layoutSelect.addEventListener('change', () => {
    layoutMode = layoutSelect.value === 'force' ? 'force' : 'rings'
    drawGraph()
  })
  root.querySelectorAll<HTMLButtonElement>('.tabs button').forEach((btn) => {
    btn.addEventListener('click', () => {
      state = { ...state, tab: (btn.dataset.tab as Tab) ?? 'details' }
      pushState()
      renderTab()
    })
  })
  window.addEventListener('hashchange', () => {
    const next = decodeState(location.hash)
    if (!next) return
    const reloadNeeded =
      next.center !== state.center || next.depth !== state.depth
    state = next
    if (reloadNeeded) void load()
    else {
      drawGraph()
      renderTab()
    }
  })

  return {
    root,
    get state() {
      return state
    },
    set state(next: ViewState) {
      state = next
    },
    load,
    setTab: (tab) => {
      state = { ...state, tab }
      pushState()
      renderTab()
    },
  } as App
}

function depthOptions(): string {
  let html = ''
  for (let d = MIN_DEPTH; d <= MAX_DEPTH; d++) {
    html += `<option value="${d}">${d}</option>`
  }
  return html
}

declare global {
  interface Window {
    __issuedepsApp?: App
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  const app = createApp(document.getElementById('app') as HTMLElement)
  window.__issuedepsApp = app
  if (app.state.center) void app.load()
}
