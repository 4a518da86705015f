/** Wire types for the annotation service JSON API. */

export interface FlagDoc {
  dimension: string;
  turn_index: number;
  detail: string;
}

export interface NextSample {
  dialogue_id: string;
  position: number;
  total: number;
  scored: number;
  trace: string;
  auto_score: number;
  flags: FlagDoc[];
}

export interface ScorePayload {
  dialogue_id: string;
  annotator: string;
  score: 0 | 1;
  feedback: string;
}

export interface Summary {
  sampled: number;
  scored: number;
  annotators: string[];
  auto_error_rate: number;
  human_error_rate: number;
  dimension_counts: Record<string, number>;
  feedback: string[];
}
