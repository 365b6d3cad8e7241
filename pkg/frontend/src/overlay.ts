import type { BoxCoords, ScoreCard } from './types';

/**
 * Minimal surface of CanvasRenderingContext2D that the overlay needs,
 * so tests can pass a recording stub.
 */
export interface BoxContext {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  setLineDash(segments: number[]): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
}

export interface OverlayStyle {
  color: string;
  lineWidth: number;
  dash: number[];
}

export const MASK_STYLE: OverlayStyle = { color: '#4f8edc', lineWidth: 2, dash: [6, 4] };
export const DETECTION_STYLE: OverlayStyle = { color: '#e0a030', lineWidth: 2, dash: [] };

/** Convert [x_min, y_min, x_max, y_max] to strokeRect arguments. */
export function boxToRect(box: BoxCoords): [number, number, number, number] {
  const [xMin, yMin, xMax, yMax] = box;
  return [xMin, yMin, xMax - xMin, yMax - yMin];
}

export function drawBox(ctx: BoxContext, box: BoxCoords, style: OverlayStyle, scale = 1): void {
  ctx.strokeStyle = style.color;
  ctx.lineWidth = style.lineWidth;
  ctx.setLineDash(style.dash);
  const [x, y, w, h] = boxToRect(box);
  ctx.strokeRect(x * scale, y * scale, w * scale, h * scale);
}

/** Draw the intended mask region and, when present, the detected box. */
export function drawOverlays(
  ctx: BoxContext,
  mask: BoxCoords,
  scoreCard: ScoreCard | null,
  scale = 1,
): void {
  drawBox(ctx, mask, MASK_STYLE, scale);
  if (scoreCard?.b_det) {
    drawBox(ctx, scoreCard.b_det, DETECTION_STYLE, scale);
  }
}

/**
 * Score readout lines for the side panel. Values are shown as-is; the
 * panel deliberately avoids suggesting which way to label.
 */
export function scoreReadout(card: ScoreCard | null): string[] {
  if (!card) return ['scores unavailable'];
  const fmt = (v: number | null, digits = 3) => (v === null ? 'n/a' : v.toFixed(digits));
  return [
    `detector confidence: ${fmt(card.s_det)}`,
    `mask IoU: ${fmt(card.iou_mask)}`,
    `aesthetic: ${fmt(card.s_aes, 2)}`,
    `prompt alignment: ${fmt(card.s_vlm)}`,
    `caption: ${card.caption ?? 'n/a'}`,
  ];
}
