/** Exact rationals over BigInt; the server speaks in num/den strings and
 * the client must never round a budget comparison. */

export interface Rational {
  num: bigint;
  den: bigint;
}

function gcd(a: bigint, b: bigint): bigint {
  a = a < 0n ? -a : a;
  b = b < 0n ? -b : b;
  while (b) {
    [a, b] = [b, a % b];
  }
  return a;
}

export function rational(num: bigint | number | string, den: bigint | number = 1n): Rational {
  if (typeof num === "string") {
    const slash = num.indexOf("/");
    if (slash >= 0) {
      return norm({ num: BigInt(num.slice(0, slash)), den: BigInt(num.slice(slash + 1)) });
    }
    return norm({ num: BigInt(num), den: BigInt(den) });
  }
  return norm({ num: BigInt(num), den: BigInt(den) });
}

function norm(r: Rational): Rational {
  if (r.den === 0n) throw new Error("zero denominator");
  let { num, den } = r;
  if (den < 0n) {
    num = -num;
    den = -den;
  }
  const g = gcd(num, den) || 1n;
  return { num: num / g, den: den / g };
}

export const ZERO: Rational = { num: 0n, den: 1n };

export function add(a: Rational, b: Rational): Rational {
  return norm({ num: a.num * b.den + b.num * a.den, den: a.den * b.den });
}

export function mulInt(a: Rational, k: bigint | number): Rational {
  return norm({ num: a.num * BigInt(k), den: a.den });
}

export function cmp(a: Rational, b: Rational): number {
  const lhs = a.num * b.den;
  const rhs = b.num * a.den;
  return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

export function toNumber(a: Rational): number {
  return Number(a.num) / Number(a.den);
}

export function fmt(a: Rational): string {
  return `${a.num}/${a.den}`;
}
