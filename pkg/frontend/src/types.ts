// Shapes exchanged with the gateway (see docs/tool_protocol.md in the repo).

export interface DocumentRef {
  kind: 'document';
  doc_id: string;
  title: string;
  char_span: [number, number];
}

export interface DatasetRef {
  kind: 'dataset';
  dataset_id: string;
  query_params: Record<string, string>;
  retrieved_at: string;
}

export type SourceRef = DocumentRef | DatasetRef;

export interface ChartPoint {
  x: string;
  y: number;
}

export interface ChartSeries {
  label: string;
  points: ChartPoint[];
}

export interface ChartSpec {
  kind: 'line' | 'bar' | 'grouped_bar';
  title: string;
  x_axis: { label: string; unit: string | null };
  y_axis?: { label: string; unit: string | null };
  series: ChartSeries[];
}

export interface TableData {
  columns: string[];
  rows: (string | number | null)[][];
}

export interface AnswerPayload {
  text: string;
  refs: SourceRef[];
  chart_spec?: ChartSpec;
  table?: TableData;
  round_limit?: boolean;
}

export interface StarterOption {
  id: string;
  label: string;
  seed_prompt: string;
}

export interface UiMessage {
  role: 'user' | 'assistant';
  text: string;
  refs: SourceRef[];
  chart?: ChartSpec;
  table?: TableData;
  pending: boolean;
}

export interface GatewayErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}
