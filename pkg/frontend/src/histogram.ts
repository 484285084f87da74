// Per-item exposure frequencies as horizontal bars, the admin's view of
// how evenly the selection strategy spreads the bank.

export function renderHistogram(
  container: HTMLElement,
  counts: Record<string, number>,
): void {
  const entries = Object.entries(counts).sort(([a], [b]) => a.localeCompare(b));
  const max = Math.max(1, ...entries.map(([, count]) => count));
  container.innerHTML = entries
    .map(([itemId, count]) => {
      const width = (count / max) * 100;
      return `
      <div class="bar-row" data-item="${itemId}" data-count="${count}">
        <span class="bar-label">${itemId}</span>
        <span class="bar" style="width: ${width.toFixed(1)}%"></span>
        <span class="bar-count">${count}</span>
      </div>`;
    })
    .join("");
}
