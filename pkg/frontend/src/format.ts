/** Score badge formatting: the API score rounded half-up to 2 decimals.
 *
 * Rounding works on the score's decimal representation (the number shown
 * in the JSON), not on binary nudges of the double: 0.756 -> "0.76",
 * 0.755 -> "0.76", 0.7549 -> "0.75". Ties round away from zero; a result
 * of zero never keeps a minus sign.
 */
export function scoreBadge(value: number): string {
  if (!Number.isFinite(value)) {
    return "0.00";
  }
  const negative = value < 0;
  let digits = Math.abs(value).toString();
  if (digits.includes("e") || digits.includes("E")) {
    digits = Math.abs(value).toFixed(12);
  }
  const dot = digits.indexOf(".");
  const intPart = dot === -1 ? digits : digits.slice(0, dot);
  const fracPart = dot === -1 ? "" : digits.slice(dot + 1);
  const intDigits = intPart.split("").map(Number);
  let d0 = fracPart.length > 0 ? Number(fracPart[0]) : 0;
  let d1 = fracPart.length > 1 ? Number(fracPart[1]) : 0;
  const next = fracPart.length > 2 ? Number(fracPart[2]) : 0;
  if (next >= 5) {
    d1 += 1;
    if (d1 === 10) {
      d1 = 0;
      d0 += 1;
      if (d0 === 10) {
        d0 = 0;
        let i = intDigits.length - 1;
        for (;;) {
          const bumped = (intDigits[i] ?? 0) + 1;
          if (bumped < 10) {
            intDigits[i] = bumped;
            break;
          }
          intDigits[i] = 0;
          i -= 1;
          if (i < 0) {
            intDigits.unshift(1);
            break;
          }
        }
      }
    }
  }
  const body = `${intDigits.join("")}.${d0}${d1}`;
  if (negative && body !== "0.00") {
    return `-${body}`;
  }
  return body;
}
