// Wire types of the session service. The UI computes no logic: it renders
// exactly what these payloads carry.

export type Path = number[];

export interface TreeNode {
  kind: string;
  path: Path;
  children: TreeNode[];
  symbol?: string;
  binder?: string;
}

export type Fragment = [string, Path];

export interface ItemPayload {
  id: number;
  color: "red" | "blue" | "green";
  text: string;
  tree: TreeNode | null;
  fragments: Fragment[];
  name?: string;
}

export interface GoalPayload {
  id: number;
  items: ItemPayload[];
}

export interface StatePayload {
  solved: boolean;
  goals: GoalPayload[];
}

export interface CandidateEntry {
  path: Path;
  kind: Record<string, string>;
}

export type ActionRecord =
  | { type: "click"; goal: number; item: number; path: Path }
  | {
      type: "dnd";
      goal: number;
      src_item: number;
      src_path: Path;
      dst_item: number;
      dst_path: Path;
    }
  | { type: "add_hyp"; goal: number; formula: string }
  | { type: "add_expr"; goal: number; name: string; term: string }
  | { type: "undo" }
  | { type: "redo" };

export interface ActionResponse {
  state: StatePayload;
  rule_trace?: { rule: string; state: string }[];
}
