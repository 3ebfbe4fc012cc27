/** Validation helpers for atom text typed by the user.
 *
 * The UI never rewrites atoms: every string sent to the service is exactly
 * what the user typed or what the service previously returned.
 */

const VARIABLE_TOKEN = /\b[A-Z_][A-Za-z0-9_]*\b/;
const ATOM_SHAPE = /^[a-z][A-Za-z0-9_]*(\(.+\))?$/;

export function isGroundAtomText(text: string): boolean {
  const trimmed = text.trim();
  if (!ATOM_SHAPE.test(trimmed)) return false;
  if (VARIABLE_TOKEN.test(trimmed)) return false;
  let depth = 0;
  for (const ch of trimmed) {
    if (ch === "(") depth += 1;
    if (ch === ")") depth -= 1;
    if (depth < 0) return false;
  }
  return depth === 0;
}

export function validateFactText(text: string): string | null {
  const trimmed = text.trim();
  if (!trimmed) return "enter a fact";
  if (!ATOM_SHAPE.test(trimmed)) return `not an atom: ${trimmed}`;
  if (VARIABLE_TOKEN.test(trimmed)) return `fact must be ground: ${trimmed}`;
  if (!isGroundAtomText(trimmed)) return `unbalanced parentheses: ${trimmed}`;
  return null;
}

export function containsExtVar(atomText: string): boolean {
  return /\bextVar\b/.test(atomText);
}
