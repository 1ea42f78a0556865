/** DTO shapes of the issuedeps HTTP API. */

export interface GraphNode {
  key: string
  title: string
  type: string
  status: string
  priority: number | null
  release: string | null
  /** server-reported hop distance from the center issue */
  distance: number
}

export interface GraphEdge {
  from: string
  to: string
  dep_type: string
  status: string
  score: number
  proposed: boolean
}

export interface SubgraphDto {
  center: string
  depth: number
  requested_depth: number
  clamped: boolean
  note?: string
  nodes: GraphNode[]
  edges: GraphEdge[]
}

export interface AppliedFactor {
  label: string
  factor: number
}

export interface ProposalDto {
  from: string
  to: string
  base_score: number
  ranked_score: number
  origins: string[]
  applied_factors: AppliedFactor[]
}

export interface ProposalsResponse {
  center: string
  proposals: ProposalDto[]
}

export interface ViolationDto {
  from: string
  to: string
  dep_type: string
  rule: string
  detail: string
}

export interface DiagDependencyDto {
  from: string
  to: string
  dep_type: string
}

export interface ConsistencyDto {
  center: string
  depth: number
  consistent: boolean
  violations: ViolationDto[]
  cross_project_skipped: number
  elapsed_ms: number
  diag_dependencies?: DiagDependencyDto[]
  diag_issues?: string[]
  dep_diag_timed_out?: boolean
  issue_diag_timed_out?: boolean
}

export interface DecisionRequest {
  from: string
  to: string
  verdict: 'accept' | 'reject'
  dep_type?: string
}

/** Dependency types a reviewer can assign when accepting a proposal. */
export const ACCEPTABLE_DEP_TYPES = [
  'duplicates',
  'requires',
  'relates',
  'replaces',
  'results',
  'tests',
  'parent_child',
] as const
