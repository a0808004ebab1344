/** Payload shapes served by the export server. */

export interface RuleInfo {
  id: number;
  name: string;
}

export interface Meta {
  model: string;
  version: string;
  din: "activity" | "probability";
  tau: number;
  t_end: number;
  seed: number;
  obs_sample: number;
  status: string;
  rules: RuleInfo[];
}

export interface Observables {
  names: string[];
  times: number[];
  values: number[][];
}

export interface NodePayload {
  rule: number;
  hits: number;
}

export interface LinkPayload {
  src: number;
  dst: number;
  value: number;
}

export interface WindowPayload {
  t_start: number;
  t_end: number;
  partial: boolean;
  nodes: NodePayload[];
  links: LinkPayload[];
}

export interface ClustersPayload {
  window: number;
  threshold: number;
  mode: string;
  clusters: number[][];
  assignment: Record<string, number>;
}

export interface SeriesPayload {
  rule: number;
  incoming: Record<string, (number | null)[]>;
  outgoing: Record<string, (number | null)[]>;
  self: (number | null)[];
}
