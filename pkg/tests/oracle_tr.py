"""Independent brute-force recursion oracle for the test curve X = z^2, y = z.

Works purely with multivariate Laurent dictionaries around z = 0 (the single
critical point, with deck map z -> -z known globally): no quotient rings, no
rational reconstruction, no shared engine code paths.  All correlators of
this curve are Laurent polynomials with support bounded well inside BOUND,
so hard exponent truncation is exact here.
"""

from specrec.rationals import Rat

BOUND = 40
KMAX = 34


class LDict:
    """Laurent polynomial in named variables: dict exponent-tuple -> Rat."""

    def __init__(self, names, terms=None):
        self.names = tuple(names)
        self.terms = dict(terms or {})

    @staticmethod
    def mono(names, exps, c=Rat(1)):
        return LDict(names, {tuple(exps): Rat(c)} if c else {})

    def lift(self, names):
        pos = {v: i for i, v in enumerate(names)}
        out = {}
        for e, c in self.terms.items():
            ee = [0] * len(names)
            for v, k in zip(self.names, e):
                ee[pos[v]] = k
            out[tuple(ee)] = c
        return LDict(names, out)

    @staticmethod
    def _union(a, b):
        return tuple(sorted(set(a.names) | set(b.names)))

    def __add__(self, other):
        names = LDict._union(self, other)
        a, b = self.lift(names), other.lift(names)
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, Rat(0)) + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return LDict(names, out)

    def __mul__(self, other):
        names = LDict._union(self, other)
        a, b = self.lift(names), other.lift(names)
        out = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if any(abs(k) > BOUND for k in e):
                    continue
                s = out.get(e, Rat(0)) + c1 * c2
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return LDict(names, out)

    def scale(self, c):
        return LDict(self.names, {e: v * c for e, v in self.terms.items()} if c else {})

    def subst_mono(self, var, target, k_target, sign):
        """var -> sign * target^k_target (a monomial substitution)."""
        names = tuple(v for v in self.names if v != var)
        if target not in names:
            names = tuple(sorted(names + (target,)))
        i = self.names.index(var)
        j = names.index(target)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = [x for n, x in enumerate(e) if n != i]
            ee = [0] * len(names)
            for v, x in zip((v for v in self.names if v != var), rest):
                ee[names.index(v)] = x
            ee[j] += k * k_target
            if sign < 0 and k % 2:
                c = -c
            if any(abs(x) > BOUND for x in ee):
                continue
            key = tuple(ee)
            s = out.get(key, Rat(0)) + c
            if s:
                out[key] = s
            elif key in out:
                del out[key]
        return LDict(names, out)

    def extract(self, var, k):
        i = self.names.index(var)
        names = tuple(v for n, v in enumerate(self.names) if n != i)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                out[tuple(x for n, x in enumerate(e) if n != i)] = c
        return LDict(names, out)

    def rename(self, mapping):
        new = [mapping.get(v, v) for v in self.names]
        order = sorted(range(len(new)), key=lambda i: new[i])
        names = tuple(new[i] for i in order)
        return LDict(names, {tuple(e[i] for i in order): c for e, c in self.terms.items()})

    def coeff(self, **kw):
        e = tuple(kw.get(v, 0) for v in self.names)
        return self.terms.get(e, Rat(0))


def pair_b(active, spect):
    """W(0,2)(za, zb) = za zb/(4(za-zb)^2) in the region |za| << |zb|."""
    names = tuple(sorted((active, spect)))
    out = {}
    for k in range(KMAX):
        e = [0, 0]
        e[names.index(active)] = k + 1
        e[names.index(spect)] = -k - 1
        out[tuple(e)] = Rat(k + 1, 4)
    return LDict(names, out)


class AiryOracle:
    def __init__(self, chi_max):
        self.tables = {}
        for chi in range(1, chi_max + 1):
            for g in range(0, chi // 2 + 2):
                m = chi + 2 - 2 * g
                if m >= 1 and (g, m) not in ((0, 1), (0, 2)):
                    self.tables[(g, m)] = self._compute(g, m)

    def names(self, m):
        return tuple("x%d" % i for i in range(m))

    def _compute(self, g, m):
        names = self.names(m)
        spect = names[1:]
        total = LDict(("zz",))
        if g >= 1:
            if (g - 1, m + 1) == (0, 2):
                piece = LDict.mono(("zz",), (0,), Rat(-1, 16))
            else:
                w = self.tables[(g - 1, m + 1)]
                mapping = {"x0": "a0", "x1": "a1"}
                for i, s in enumerate(spect):
                    mapping["x%d" % (i + 2)] = s
                w = w.rename(mapping)
                piece = w.subst_mono("a0", "zz", 1, 1).subst_mono("a1", "zz", 1, -1)
            total = total + piece
        for mask in range(1 << len(spect)):
            left = [s for i, s in enumerate(spect) if mask >> i & 1]
            right = [s for i, s in enumerate(spect) if not mask >> i & 1]
            for g1 in range(0, g + 1):
                g2 = g - g1
                if (g1, len(left)) == (0, 0) or (g2, len(right)) == (0, 0):
                    continue
                piece = self._block(g1, left, 1) * self._block(g2, right, -1)
                total = total + piece
        # W(g,m)(x0,...) = sum over odd k of (1/2) x0^{-k} [zz^{1-k}] Q
        acc = LDict(names)
        for k in range(1, KMAX, 2):
            part = total.extract("zz", 1 - k)
            if not part.terms:
                continue
            acc = acc + part * LDict.mono(("x0",), (-k,), Rat(1, 2))
        return acc.lift(names) if set(acc.names) != set(names) else acc

    def _block(self, g, subset, sign):
        m = 1 + len(subset)
        if (g, m) == (0, 1):
            return LDict.mono(("zz",), (1,), Rat(sign))
        if (g, m) == (0, 2):
            return pair_b("b0", subset[0]).subst_mono("b0", "zz", 1, sign)
        w = self.tables[(g, m)]
        mapping = {"x0": "b0"}
        for i, s in enumerate(subset):
            mapping["x%d" % (i + 1)] = s
        return w.rename(mapping).subst_mono("b0", "zz", 1, sign)
