// Qualitative palettes. The three entity dimensions draw from disjoint hue
// families so a sample chip can never be confused with an AOI chip.

const SAMPLE_COLORS = ["#2d7dd2", "#28aab8", "#5b6ee1", "#1b998b", "#4062bb", "#44bfd6"];
const AOI_COLORS = ["#e4572e", "#d81159", "#f3a712", "#a4036f", "#c75000", "#e54f6d"];
const TWI_COLORS = ["#3f9b4f", "#7cb518", "#2f7a36", "#9fc131", "#5c8001", "#6da34d"];

export type Dimension = "sample" | "aoi" | "twi";

const PALETTES: Record<Dimension, string[]> = {
  sample: SAMPLE_COLORS,
  aoi: AOI_COLORS,
  twi: TWI_COLORS,
};

// gid 0 means ungrouped; it gets the neutral tone instead of a palette slot
export const UNGROUPED = "#9aa0a6";

export function colorForGroup(dim: Dimension, gid: number): string {
  if (gid <= 0) return UNGROUPED;
  const palette = PALETTES[dim];
  return palette[(gid - 1) % palette.length]!;
}

// stable per-entity tint used when entities of one group need telling apart
export function colorForIndex(dim: Dimension, index: number): string {
  const palette = PALETTES[dim];
  return palette[index % palette.length]!;
}

export const HIGHLIGHT = "#ffd60a";
export const DIMMED = "rgba(120, 126, 133, 0.25)";
