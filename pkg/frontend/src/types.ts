// Wire types mirroring the server's JSON documents.

export interface GraphSummary {
  id: string;
  mode: string;
  stage_label: string | null;
  node_count: number;
  edge_count: number;
}

export interface GraphNode {
  id: string;
  label: string;
  kind: "ability" | "data-source" | "data-sink";
  solution_neutral: "yes" | "no" | "unreviewed";
  ability_formulated: boolean;
  provenance: [string, string][];
  cluster_tag: string | null;
}

export interface GraphEdge {
  from: string;
  to: string;
  kind: "quality-dependency" | "information-flow";
  multiplicity: number;
  provenance: string[];
}

export interface GraphDocument {
  format_version: number;
  kind: string;
  id: string;
  mode: string;
  stage_label: string | null;
  view: boolean;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export type CandidateStatus = "pending" | "approved" | "rejected";

export interface CandidateMember {
  graph: string;
  node: string;
  label: string;
}

export interface Candidate {
  candidate_id: string;
  similarity: number;
  status: CandidateStatus;
  canonical_label: string | null;
  members: CandidateMember[];
}

export interface SessionRecord {
  session_id: string;
  base_graph: string;
  others: string[];
  threshold: number;
  created_at: string;
  status: "open" | "applied";
  candidates: Candidate[];
  merged_graph_id?: string;
}

export interface ApplyResult {
  merged_graph_id: string;
  stage_stats: { stage_label: string; node_count: number; edge_count: number }[];
}

export interface CoverageReport {
  graph_id: string;
  mapping_id: string;
  complete: boolean;
  covered: string[];
  uncovered: string[];
  unmapped_modules: string[];
}

export interface AbilityState {
  score: number;
  available: boolean;
}

export interface MonitorState {
  graph_id: string;
  mapping_id: string;
  policy: "min" | "mean";
  modules: Record<string, string | number>;
  abilities: Record<string, AbilityState>;
}

export interface CoverageMapping {
  mapping_id: string;
  modules: { name: string; abilities: string[] }[];
}
