/** Wire types for the annotation service API (`/api/...`). */

export type OpKind = "keep" | "insert" | "delete";

export interface TaxonomyEntry {
  category: string;
  edit_class: string;
  definition: string;
  example: string;
}

export interface OperationView {
  index: number;
  kind: OpKind;
  tokens: string[];
}

export interface PairSummary {
  pair_id: string;
  status: string;
  assigned_to: string[];
  annotators_done: string[];
  version: number;
}

export interface GroupWire {
  category: string;
  op_indices: number[];
}

export interface AnnotationWire {
  pair_id: string;
  annotator_id: string;
  unaligned_flag: boolean;
  groups: GroupWire[];
  completed_at?: string;
}

export interface PairDetail extends PairSummary {
  markup: string;
  operations: OperationView[];
  annotations: AnnotationWire[];
}

export interface PairList {
  total: number;
  offset: number;
  limit: number;
  items: PairSummary[];
}

export interface SubmitResult {
  pair_id: string;
  version: number;
  status: string;
  record: AnnotationWire;
}

export interface AssignResult {
  assigned: number;
  double_assigned: number;
}
