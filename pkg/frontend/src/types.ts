/** Wire types for the annotation service API (see the package README). */

/** Axis-aligned box as [x_min, y_min, x_max, y_max], origin top-left. */
export type BoxCoords = [number, number, number, number];

export interface ScoreCard {
  s_det: number | null;
  b_det: BoxCoords | null;
  iou_mask: number | null;
  s_aes: number | null;
  caption: string | null;
  s_vlm: number | null;
  incomplete: boolean;
  failed_component: string | null;
}

export interface QueueItem {
  candidate_id: string;
  image_url: string;
  score_card: ScoreCard | null;
  mask: BoxCoords;
}

export type Label = 'accept' | 'reject';

export interface LabelAck {
  candidate_id: string;
  label: Label;
  annotator_id: string;
  annotated_at: string;
}

export interface Progress {
  pending: number;
  labeled: number;
  total: number;
}

export interface ExportEntry {
  candidate_id: string;
  label: Label;
  votes?: Record<string, number>;
}

export interface ExportResponse {
  labels: ExportEntry[];
  ties: string[];
}
