// Client-side mirrors of the server's item validation, for immediate form
// feedback. The server remains the authority; these rules only pre-empt the
// round trip for the obvious cases.

export interface ItemDraft {
  id: string;
  stem: string;
  options: string[];
  correctOptions: number[];
  difficultyLevel: number;
}

function binomial(n: number, k: number): number {
  if (k < 0 || k > n) return 0;
  let result = 1;
  for (let i = 0; i < k; i += 1) {
    result = (result * (n - i)) / (i + 1);
  }
  return result;
}

/** Probability of blindly guessing the exact correct subset: 1 / C(n, k). */
export function structuralGuessing(nOptions: number, nCorrect: number): number {
  if (nOptions < 2 || nCorrect < 1 || nCorrect >= nOptions) {
    throw new RangeError(
      `need 1 <= correct < options with at least two options, got ${nCorrect} of ${nOptions}`,
    );
  }
  return 1 / binomial(nOptions, nCorrect);
}

export function validateItemDraft(draft: ItemDraft): string[] {
  const problems: string[] = [];
  if (!draft.id.trim()) problems.push("item id is required");
  if (!draft.stem.trim()) problems.push("stem is required");
  const options = draft.options.filter((option) => option.trim().length > 0);
  if (options.length < 2) problems.push("at least two options are required");
  if (draft.correctOptions.length === 0) {
    problems.push("mark at least one option as correct");
  }
  if (draft.correctOptions.some((index) => index < 0 || index >= options.length)) {
    problems.push("a correct option index is out of range");
  }
  if (draft.correctOptions.length >= options.length && options.length > 0) {
    problems.push("not every option can be correct");
  }
  if (![1, 2, 3, 4, 5].includes(draft.difficultyLevel)) {
    problems.push("difficulty level must be 1..5");
  }
  return problems;
}

/** Pre-fill value for the guessing field, or null when the draft is not ready. */
export function guessingPrefill(draft: ItemDraft): number | null {
  const options = draft.options.filter((option) => option.trim().length > 0);
  const correct = new Set(draft.correctOptions).size;
  if (options.length < 2 || correct < 1 || correct >= options.length) return null;
  return structuralGuessing(options.length, correct);
}
