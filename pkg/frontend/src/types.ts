/** Wire types for the solving service. The UI never derives logic itself:
 * formulas, spans, applicability and verdicts all come from these payloads. */

export interface LayoutNode {
  path: number[];
  start: number;
  end: number;
  kind: string;
  /** member cells of a chain node, parentheses included */
  members?: [number, number][];
}

export interface Layout {
  text: string;
  nodes: LayoutNode[];
}

export interface Marked {
  path: number[];
  slice?: [number, number];
}

export interface Verdict {
  ok: boolean;
  stage: string;
  error: string | null;
  message: string | null;
  clue: string | null;
}

export interface StepEntry {
  op: "apply" | "undo";
  formula?: string;
  verdict?: Verdict | null;
}

export interface SessionState {
  id: string;
  task_id: string;
  mode: "RULE" | "INPUT";
  feedback: boolean;
  phase: "Marking" | "Replacing" | "Finished";
  formula: string;
  layout: Layout;
  stage: string;
  task_vars: string[];
  marked: Marked | null;
  steps: StepEntry[];
  completed: boolean;
}

export interface ApplicableRule {
  rule: number;
  name: string;
  params: { member?: number[]; vars?: string[] };
}

export interface MarkResponse {
  state: SessionState;
  applicable: ApplicableRule[];
}

export interface StepResponse {
  state: SessionState;
  verdict:
    | (Verdict & {
        rule: number | null;
        rule_name: string | null;
        free_input: boolean;
        no_change: boolean;
        before: string;
        after: string;
      })
    | null;
}

export interface RuleInfo {
  id: number;
  name: string;
  kind: string;
  stage: number | null;
  params: "none" | "member" | "vars";
}

export interface ServiceError {
  error: string;
  code: string;
}
