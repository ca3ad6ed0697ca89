// Document shapes mirrored from the peerplan HTTP API.  The console never
// derives these values itself; everything numeric arrives in one of them.

export type Behavior = "user" | "non_user";
export type TieStrength = "strong" | "weak";

export interface NodeDoc {
  id: string;
  behavior: Behavior;
}

export interface TieDoc {
  from: string;
  to: string;
  strength: TieStrength;
}

export interface NetworkDoc {
  nodes: NodeDoc[];
  ties: TieDoc[];
}

export interface PartitionDoc {
  assignment: Record<string, number>;
}

export interface FlipRisk {
  become_user: number;
  become_nonuser: number;
}

export interface EvaluationDoc {
  expected_nonusers: number;
  success: number;
  flips: Record<string, FlipRisk>;
  partition?: PartitionDoc;
}

export interface CapacityDoc {
  lo: number;
  hi: number;
}

export interface ParamsDoc {
  flip_to_user?: number;
  flip_to_nonuser?: number;
  weight_strong?: number;
  weight_weak?: number;
  capacity?: CapacityDoc;
  include_facilitator?: boolean;
}

export interface ConstraintsDoc {
  pinned?: Record<string, number>;
  must_link?: string[][];
  cannot_link?: string[][];
  frozen_groups?: number[];
}

export interface SolveRequest {
  algo?: string;
  seed?: number;
  restarts?: number;
  stall_limit?: number;
  time_limit?: number;
  params?: ParamsDoc;
  constraints?: ConstraintsDoc;
  absent?: string[];
  reoptimize?: boolean;
}

export interface SolveResponse {
  algorithm: string;
  partition: PartitionDoc;
  evaluation: EvaluationDoc;
  restarts_completed: number;
  improvement_trace: { restart: number; objective: number }[];
  result_id: string;
  roster_version: number;
  deviancy_warning: boolean;
}

export interface EvaluateResponse extends EvaluationDoc {
  deviancy_warning: boolean;
}

export interface HistoryEntryDoc {
  result_id: string;
  algorithm: string;
  constraints: ConstraintsDoc;
}

export interface RosterDoc {
  id: string;
  name: string;
  created_at: string;
  updated_at: string;
  version: number;
  network: NetworkDoc;
  history: HistoryEntryDoc[];
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
