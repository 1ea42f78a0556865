/**
 * The right-hand tabs: issue details, proposal review, consistency report.
 *
 * No business logic lives here: violations, rankings, and filters all come
 * from the API; this module only renders them and posts decisions back.
 */
import { postDecision } from './api'
import type {
  ConsistencyDto,
  GraphNode,
  ProposalDto,
} from './types'
import { ACCEPTABLE_DEP_TYPES } from './types'

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) node.className = className
  if (text !== undefined) node.textContent = text
  return node
}

export function renderDetails(container: HTMLElement, node: GraphNode | null): void {
  container.textContent = ''
  if (!node) {
    container.appendChild(el('p', 'empty', 'Select an issue in the graph.'))
    return
  }
  const dl = el('dl', 'details')
  const rows: [string, string][] = [
    ['Key', node.key],
    ['Title', node.title],
    ['Type', node.type],
    ['Status', node.status],
    ['Priority', node.priority === null ? 'unset' : `P${node.priority}`],
    ['Release', node.release ?? 'unscheduled'],
    ['Distance', String(node.distance)],
  ]
  for (const [term, value] of rows) {
    dl.appendChild(el('dt', undefined, term))
    dl.appendChild(el('dd', undefined, value))
  }
  container.appendChild(dl)
}

export interface ReviewHandlers {
  /** called after a decision was stored, to refresh proposals and graph */
  onDecided: () => void
  onError?: (message: string, retry: () => void) => void
}

export function renderProposals(
  container: HTMLElement,
  center: string,
  proposals: ProposalDto[],
  disregarded: Set<string>,
  handlers: ReviewHandlers
): void {
  container.textContent = ''
  const visible = proposals.filter((p) => !disregarded.has(p.to))
  if (!visible.length) {
    container.appendChild(el('p', 'empty', 'No open proposals.'))
    return
  }
  const list = el('ul', 'proposal-list')
  for (const proposal of visible) {
    list.appendChild(proposalItem(center, proposal, disregarded, handlers))
  }
  container.appendChild(list)
}

function proposalItem(
  center: string,
  proposal: ProposalDto,
  disregarded: Set<string>,
  handlers: ReviewHandlers
): HTMLLIElement {
  const item = el('li', 'proposal')
  item.dataset.target = proposal.to

  const head = el('div', 'proposal-head')
  head.appendChild(el('strong', undefined, proposal.to))
  head.appendChild(
    el('span', 'score', ` score ${proposal.ranked_score.toFixed(3)}`)
  )
  head.appendChild(
    el('span', 'origins', ` via ${proposal.origins.join(' + ')}`)
  )
  item.appendChild(head)
  if (proposal.applied_factors.length) {
    item.appendChild(
      el(
        'div',
        'factors',
        proposal.applied_factors
          .map((f) => `${f.label} ×${f.factor}`)
          .join(', ')
      )
    )
  }

  const controls = el('div', 'controls')
  const typeSelect = el('select') as HTMLSelectElement
  typeSelect.className = 'dep-type'
  const placeholder = el('option', undefined, 'choose type…') as HTMLOptionElement
  placeholder.value = ''
  typeSelect.appendChild(placeholder)
  for (const depType of ACCEPTABLE_DEP_TYPES) {
    const option = el('option', undefined, depType) as HTMLOptionElement
    option.value = depType
    typeSelect.appendChild(option)
  }

  const acceptBtn = el('button', 'accept', 'Accept') as HTMLButtonElement
  acceptBtn.disabled = true
  typeSelect.addEventListener('change', () => {
    acceptBtn.disabled = typeSelect.value === ''
  })
  const rejectBtn = el('button', 'reject', 'Reject') as HTMLButtonElement
  const disregardBtn = el('button', 'disregard', 'Disregard') as HTMLButtonElement

  const decide = (verdict: 'accept' | 'reject', depType?: string) => {
    const run = () =>
      postDecision({ from: center, to: proposal.to, verdict, dep_type: depType })
        .then(() => handlers.onDecided())
        .catch((err) =>
          handlers.onError?.(String(err?.message ?? err), run)
        )
    run()
  }

  acceptBtn.addEventListener('click', () => {
    if (!typeSelect.value) return
    decide('accept', typeSelect.value)
  })
  rejectBtn.addEventListener('click', () => decide('reject'))
  disregardBtn.addEventListener('click', () => {
    // local-only: hide for this session without informing the server
    disregarded.add(proposal.to)
    item.remove()
  })

  controls.appendChild(typeSelect)
  controls.appendChild(acceptBtn)
  controls.appendChild(rejectBtn)
  controls.appendChild(disregardBtn)
  item.appendChild(controls)
  return item
}

export function renderConsistency(
  container: HTMLElement,
  result: ConsistencyDto
): void {
  container.textContent = ''
  if (result.consistent) {
    container.appendChild(el('div', 'banner consistent', 'Consistent'))
    return
  }
  container.appendChild(
    el(
      'div',
      'banner inconsistent',
      `Inconsistent: ${result.violations.length} violation(s)`
    )
  )
  const list = el('ul', 'violations')
  for (const violation of result.violations) {
    const item = el('li', 'violation')
    item.appendChild(
      el('code', undefined, `${violation.from} → ${violation.to}`)
    )
    item.appendChild(el('span', 'rule', ` ${violation.rule}`))
    item.appendChild(el('div', 'detail', violation.detail))
    list.appendChild(item)
  }
  container.appendChild(list)
  if (result.cross_project_skipped > 0) {
    container.appendChild(
      el(
        'p',
        'note',
        `${result.cross_project_skipped} cross-project dependencies skipped`
      )
    )
  }
  if (result.diag_dependencies === undefined) return

  const columns = el('div', 'diagnosis-columns')
  columns.appendChild(
    diagnosisColumn(
      'Remove dependencies',
      result.dep_diag_timed_out ?? false,
      (result.diag_dependencies ?? []).map(
        (d) => `${d.from} → ${d.to} (${d.dep_type})`
      )
    )
  )
  columns.appendChild(
    diagnosisColumn(
      'Re-schedule / re-prioritize issues',
      result.issue_diag_timed_out ?? false,
      result.diag_issues ?? []
    )
  )
  container.appendChild(columns)
}

function diagnosisColumn(
  title: string,
  timedOut: boolean,
  entries: string[]
): HTMLElement {
  const column = el('div', 'diagnosis')
  column.appendChild(el('h3', undefined, title))
  if (timedOut) {
    column.appendChild(el('p', 'timeout', 'diagnosis timed out (5 s)'))
    return column
  }
  if (!entries.length) {
    column.appendChild(el('p', 'empty', 'nothing to change'))
    return column
  }
  const list = el('ul')
  for (const entry of entries) list.appendChild(el('li', undefined, entry))
  column.appendChild(list)
  return column
}
