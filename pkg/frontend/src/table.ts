/**
 * Display-side sorting and pagination for result tables.
 *
 * This is presentation only: the payload rows are never mutated, and every
 * rendered cell is the exact string the API sent. Numeric columns sort by
 * value, everything else lexicographically; nulls sort first.
 */

export const PAGE_SIZE = 50;

export interface TableState {
  sortColumn: number | null;
  descending: boolean;
  page: number;
}

export function initialTableState(): TableState {
  return { sortColumn: null, descending: false, page: 0 };
}

const NUMERIC_TYPES = new Set(["int", "float"]);

function compareCells(
  a: string | null,
  b: string | null,
  type: string,
): number {
  if (a === null || b === null) {
    return (a === null ? 0 : 1) - (b === null ? 0 : 1);
  }
  if (NUMERIC_TYPES.has(type)) {
    return Number(a) - Number(b);
  }
  return a < b ? -1 : a > b ? 1 : 0;
}

/** Stable sort of a copy of `rows` per the state; identity when unsorted. */
export function visibleOrder(
  rows: readonly (string | null)[][],
  types: readonly string[],
  state: TableState,
): (string | null)[][] {
  const copy = rows.map((row) => [...row]);
  const column = state.sortColumn;
  if (column === null) {
    return copy;
  }
  const type = types[column] ?? "text";
  const sign = state.descending ? -1 : 1;
  return copy
    .map((row, index) => ({ row, index }))
    .sort((x, y) => {
      const byValue = compareCells(
        x.row[column] ?? null,
        y.row[column] ?? null,
        type,
      );
      return byValue !== 0 ? sign * byValue : x.index - y.index;
    })
    .map((entry) => entry.row);
}

export function pageCount(totalRows: number): number {
  return Math.max(1, Math.ceil(totalRows / PAGE_SIZE));
}

export function pageSlice<T>(rows: readonly T[], page: number): readonly T[] {
  const start = page * PAGE_SIZE;
  return rows.slice(start, start + PAGE_SIZE);
}

/** Click on a header: toggle direction on the same column, else sort asc. */
export function nextSortState(state: TableState, column: number): TableState {
  if (state.sortColumn === column) {
    return { ...state, descending: !state.descending, page: 0 };
  }
  return { sortColumn: column, descending: false, page: 0 };
}
