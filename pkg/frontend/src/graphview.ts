/**
 * SVG graph rendering: concentric rings, status colors, dashed proposals.
 *
 * Rendering is a pure function of (dto, filters, layout); drag, zoom, and
 * pan mutate only the view transform / node positions and re-render edges.
 */
import { computeLayout, LayoutMode, Point } from './layout'
import type { GraphEdge, GraphNode, SubgraphDto } from './types'

const SVG_NS = 'http://www.w3.org/2000/svg'

const STATUS_COLORS: Record<string, string> = {
  Open: '#4878a8',
  'In Progress': '#e0a030',
  Closed: '#6aa84f',
  Done: '#6aa84f',
  Reported: '#8a6fb8',
}

export function statusColor(status: string): string {
  return STATUS_COLORS[status] ?? '#888888'
}

export interface GraphViewOptions {
  width?: number
  height?: number
  layoutMode?: LayoutMode
  onSelect?: (key: string) => void
}

export interface GraphView {
  svg: SVGSVGElement
  positions: Map<string, Point>
  nodes: GraphNode[]
  edges: GraphEdge[]
}

export function applyFilters(
  dto: SubgraphDto,
  typeFilters: string[],
  statusFilters: string[]
): { nodes: GraphNode[]; edges: GraphEdge[] } {
  let nodes = dto.nodes
  if (typeFilters.length) {
    nodes = nodes.filter(
      (n) => n.key === dto.center || typeFilters.includes(n.type)
    )
  }
  if (statusFilters.length) {
    nodes = nodes.filter(
      (n) => n.key === dto.center || statusFilters.includes(n.status)
    )
  }
  const keep = new Set(nodes.map((n) => n.key))
  const edges = dto.edges.filter((e) => keep.has(e.from) && keep.has(e.to))
  return { nodes, edges }
}

export function renderGraph(
  container: HTMLElement,
  dto: SubgraphDto,
  typeFilters: string[] = [],
  statusFilters: string[] = [],
  options: GraphViewOptions = {}
): GraphView {
  const width = options.width ?? 900
  const height = options.height ?? 640
  const mode = options.layoutMode ?? 'rings'
  const { nodes, edges } = applyFilters(dto, typeFilters, statusFilters)
  const positions = computeLayout(mode, nodes, edges, { width, height })

  container.textContent = ''
  const svg = document.createElementNS(SVG_NS, 'svg') as SVGSVGElement
  svg.setAttribute('width', String(width))
  svg.setAttribute('height', String(height))
  svg.setAttribute('viewBox', `0 0 ${width} ${height}`)
  svg.classList.add('graph-view')

  const edgeLayer = document.createElementNS(SVG_NS, 'g')
  edgeLayer.setAttribute('data-layer', 'edges')
  const nodeLayer = document.createElementNS(SVG_NS, 'g')
  nodeLayer.setAttribute('data-layer', 'nodes')
  svg.appendChild(edgeLayer)
  svg.appendChild(nodeLayer)

  const edgeElems: { line: SVGLineElement; edge: GraphEdge }[] = []
  for (const edge of edges) {
    const a = positions.get(edge.from)
    const b = positions.get(edge.to)
    if (!a || !b) continue
    const line = document.createElementNS(SVG_NS, 'line') as SVGLineElement
    line.setAttribute('x1', a.x.toFixed(1))
    line.setAttribute('y1', a.y.toFixed(1))
    line.setAttribute('x2', b.x.toFixed(1))
    line.setAttribute('y2', b.y.toFixed(1))
    line.setAttribute('stroke', edge.proposed ? '#c06050' : '#9aa5b1')
    line.setAttribute('stroke-width', '1.5')
    if (edge.proposed) line.setAttribute('stroke-dasharray', '6 4')
    line.dataset.from = edge.from
    line.dataset.to = edge.to
    line.dataset.depType = edge.dep_type
    line.dataset.proposed = String(edge.proposed)
    line.classList.add('edge', edge.proposed ? 'edge-proposed' : 'edge-solid')
    edgeLayer.appendChild(line)
    edgeElems.push({ line, edge })
  }

  for (const node of nodes) {
    const p = positions.get(node.key)
    if (!p) continue
    const group = document.createElementNS(SVG_NS, 'g') as SVGGElement
    group.classList.add('node')
    group.dataset.key = node.key
    group.dataset.ring = String(p.ring)
    group.dataset.status = node.status
    group.setAttribute('transform', `translate(${p.x.toFixed(1)},${p.y.toFixed(1)})`)
    const circle = document.createElementNS(SVG_NS, 'circle')
    circle.setAttribute('r', node.key === dto.center ? '14' : '9')
    circle.setAttribute('fill', statusColor(node.status))
    circle.setAttribute(
      'stroke',
      node.key === dto.center ? '#202733' : '#ffffff'
    )
    circle.setAttribute('stroke-width', node.key === dto.center ? '3' : '1.5')
    const label = document.createElementNS(SVG_NS, 'text')
    label.textContent = node.key
    label.setAttribute('y', '-14')
    label.setAttribute('text-anchor', 'middle')
    label.setAttribute('font-size', '11')
    group.appendChild(circle)
    group.appendChild(label)
    const title = document.createElementNS(SVG_NS, 'title')
    title.textContent = `${node.key}: ${node.title} [${node.status}]`
    group.appendChild(title)
    nodeLayer.appendChild(group)

    group.addEventListener('click', () => options.onSelect?.(node.key))
    attachDrag(group, node.key, positions, edgeElems, svg)
  }

  attachZoomPan(svg, width, height)
  container.appendChild(svg)
  return { svg, positions, nodes, edges }
}

function attachDrag(
  group: SVGGElement,
  key: string,
  positions: Map<string, Point>,
  edgeElems: { line: SVGLineElement; edge: GraphEdge }[],
  svg: SVGSVGElement
): void {
  let dragging = false
  group.addEventListener('pointerdown', (ev) => {
    dragging = true
    ev.stopPropagation()
  })
  svg.addEventListener('pointermove', (ev: PointerEvent) => {
    if (!dragging) return
    const p = positions.get(key)
    if (!p) return
    p.x += ev.movementX ?? 0
    p.y += ev.movementY ?? 0
    group.setAttribute('transform', `translate(${p.x.toFixed(1)},${p.y.toFixed(1)})`)
    for (const { line, edge } of edgeElems) {
      if (edge.from === key) {
        line.setAttribute('x1', p.x.toFixed(1))
        line.setAttribute('y1', p.y.toFixed(1))
      }
      if (edge.to === key) {
        line.setAttribute('x2', p.x.toFixed(1))
        line.setAttribute('y2', p.y.toFixed(1))
      }
    }
  })
  svg.addEventListener('pointerup', () => {
    dragging = false
  })
}

function attachZoomPan(svg: SVGSVGElement, width: number, height: number): void {
  let viewX = 0
  let viewY = 0
  let viewW = width
  let viewH = height
  let panning = false

  const apply = () =>
    svg.setAttribute('viewBox', `${viewX} ${viewY} ${viewW} ${viewH}`)

  svg.addEventListener('wheel', (ev: WheelEvent) => {
    ev.preventDefault()
    const scale = ev.deltaY > 0 ? 1.1 : 0.9
    const newW = Math.min(width * 4, Math.max(width / 8, viewW * scale))
    const newH = (newW / viewW) * viewH
    viewX += (viewW - newW) / 2
    viewY += (viewH - newH) / 2
    viewW = newW
    viewH = newH
    apply()
  })
  svg.addEventListener('pointerdown', () => {
    panning = true
  })
  svg.addEventListener('pointermove', (ev: PointerEvent) => {
    if (!panning) return
    viewX -= (ev.movementX ?? 0) * (viewW / width)
    viewY -= (ev.movementY ?? 0) * (viewH / height)
    apply()
  })
  svg.addEventListener('pointerup', () => {
    panning = false
  })
}
