/** The seven graded preference labels, exactly as the server stores them. */

export type LabelSymbol =
  | "FAR_BETTER_A"
  | "BETTER_A"
  | "SLIGHTLY_BETTER_A"
  | "EQUIVALENT"
  | "SLIGHTLY_BETTER_B"
  | "BETTER_B"
  | "FAR_BETTER_B";

export interface LabelChoice {
  symbol: LabelSymbol;
  caption: string;
  /** keyboard shortcut, "1".."7" */
  key: string;
}

/** Button order: strongest preference for A down to strongest for B. */
export const LABELS: readonly LabelChoice[] = [
  { symbol: "FAR_BETTER_A", caption: "A is far better than B", key: "1" },
  { symbol: "BETTER_A", caption: "A is better than B", key: "2" },
  { symbol: "SLIGHTLY_BETTER_A", caption: "A is slightly better than B", key: "3" },
  { symbol: "EQUIVALENT", caption: "A and B are equivalent", key: "4" },
  { symbol: "SLIGHTLY_BETTER_B", caption: "B is slightly better than A", key: "5" },
  { symbol: "BETTER_B", caption: "B is better than A", key: "6" },
  { symbol: "FAR_BETTER_B", caption: "B is far better than A", key: "7" },
];

const MIRROR: Record<LabelSymbol, LabelSymbol> = {
  FAR_BETTER_A: "FAR_BETTER_B",
  BETTER_A: "BETTER_B",
  SLIGHTLY_BETTER_A: "SLIGHTLY_BETTER_B",
  EQUIVALENT: "EQUIVALENT",
  SLIGHTLY_BETTER_B: "SLIGHTLY_BETTER_A",
  BETTER_B: "BETTER_A",
  FAR_BETTER_B: "FAR_BETTER_A",
};

export function mirrorLabel(symbol: LabelSymbol): LabelSymbol {
  return MIRROR[symbol];
}

export function labelForKey(key: string): LabelChoice | undefined {
  return LABELS.find((l) => l.key === key);
}

export function captionFor(symbol: LabelSymbol): string {
  const choice = LABELS.find((l) => l.symbol === symbol);
  if (!choice) throw new Error(`unknown label symbol ${symbol}`);
  return choice.caption;
}
