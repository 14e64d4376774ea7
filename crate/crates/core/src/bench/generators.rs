//! Instance families: the implication chain, the pigeonhole pair, the
//! hidden-key hash query and random partitioned 3-CNF.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formula::{load_partitioned, Clause, Lit, PartitionedFormula, Var};

fn cl(lits: &[i32]) -> Clause {
    Clause::from_dimacs(lits)
}

/// Alternating implication chain over `s1..s_2n`. The secondary part holds
/// `s_{2k-1} -> s_{2k}` split on a local `la_k`; the main part forces `s1`,
/// links `s_{2k} -> s_{2k+1}` through a local `lb_{k+1}` and refutes
/// `s_{2n}`. Variables: `s` are `1..=2n`, `la` follow, then `lb`.
pub fn gen_chain(n: usize) -> Result<PartitionedFormula> {
    if n == 0 {
        return Err(Error::Generator("chain needs at least one stage".into()));
    }
    let n = n as i32;
    let s = |k: i32| k;
    let la = |k: i32| 2 * n + k;
    let lb = |k: i32| 3 * n + k;
    let mut sec = Vec::new();
    let mut main = vec![cl(&[s(1), lb(1)]), cl(&[s(1), -lb(1)])];
    for k in 1..=n {
        sec.push(cl(&[-s(2 * k - 1), -la(k), s(2 * k)]));
        sec.push(cl(&[-s(2 * k - 1), la(k), s(2 * k)]));
        if k < n {
            main.push(cl(&[-s(2 * k), -lb(k + 1), s(2 * k + 1)]));
            main.push(cl(&[-s(2 * k), lb(k + 1), s(2 * k + 1)]));
        }
    }
    main.push(cl(&[-s(2 * n), lb(n + 1)]));
    main.push(cl(&[-s(2 * n), -lb(n + 1)]));
    load_partitioned(sec, main, (4 * n + 1) as usize, None)
}

/// Pigeonhole pair: `n` pigeons, `n - 1` holes. The secondary part holds
/// `(a -> x) & (!a -> x)` and the pigeon clauses, the main part holds
/// `(b -> !x) & (!b -> !x)` and the hole clauses, so every pigeon variable
/// is shared.
pub struct PhpPair {
    pub formula: PartitionedFormula,
    pub x: Var,
    /// Sign bit local to the secondary part.
    pub a: Var,
    /// Sign bit local to the main part.
    pub b: Var,
}

pub fn gen_php_pair(n: usize) -> Result<PhpPair> {
    if n < 2 {
        return Err(Error::Generator("pigeonhole needs at least two pigeons".into()));
    }
    let holes = n - 1;
    let p = |i: usize, h: usize| (i * holes + h + 1) as i32;
    let x = (n * holes + 1) as i32;
    let (a, b) = (x + 1, x + 2);
    let mut sec = vec![cl(&[-a, x]), cl(&[a, x])];
    for i in 0..n {
        sec.push(Clause::from_dimacs(&(0..holes).map(|h| p(i, h)).collect::<Vec<_>>()));
    }
    let mut main = vec![cl(&[-b, -x]), cl(&[b, -x])];
    for h in 0..holes {
        for i in 0..n {
            for j in i + 1..n {
                main.push(cl(&[-p(i, h), -p(j, h)]));
            }
        }
    }
    let formula = load_partitioned(sec, main, b as usize, None)?;
    Ok(PhpPair {
        formula,
        x: Var::new(x as u32),
        a: Var::new(a as u32),
        b: Var::new(b as u32),
    })
}

/// Random partitioned 3-CNF at clause/variable ratio 4.26; each clause goes
/// to either part with equal probability and the interface is the set of
/// shared variables.
pub fn gen_random_3cnf(n_vars: usize, seed: u64) -> PartitionedFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_clauses = (n_vars as f64 * 4.26).round() as usize;
    let vars: Vec<i32> = (1..=n_vars as i32).collect();
    let (mut sec, mut main) = (Vec::new(), Vec::new());
    for _ in 0..n_clauses {
        let lits: Vec<i32> = vars
            .choose_multiple(&mut rng, 3)
            .map(|&v| if rng.gen() { v } else { -v })
            .collect();
        if rng.gen() {
            sec.push(cl(&lits));
        } else {
            main.push(cl(&lits));
        }
    }
    load_partitioned(sec, main, n_vars, None).expect("shared variables form the interface")
}

/// Suite of random instances with 10 to 30 variables.
pub fn random_suite(count: usize, seed: u64) -> Vec<PartitionedFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(10..=30);
            gen_random_3cnf(n, rng.gen())
        })
        .collect()
}

// ---------------------------------------------------------------- hidden key

pub const WORDS: usize = 4;
pub type Block = [u32; WORDS];

/// One mixing round on the four-word state: add, xor, rotate.
fn round_native(s: &mut Block) {
    let [mut a, mut b, mut c, mut d] = *s;
    a = a.wrapping_add(b);
    d = (d ^ a).rotate_left(16);
    c = c.wrapping_add(d);
    b = (b ^ c).rotate_left(12);
    a = a.wrapping_add(b);
    d = (d ^ a).rotate_left(8);
    c = c.wrapping_add(d);
    b = (b ^ c).rotate_left(7);
    *s = [a, b, c, d];
}

/// The surrogate hash: `rounds` mixing rounds followed by a feed-forward
/// addition of the input.
pub fn hash_native(input: &Block, rounds: usize) -> Block {
    let mut s = *input;
    for _ in 0..rounds {
        round_native(&mut s);
    }
    std::array::from_fn(|i| s[i].wrapping_add(input[i]))
}

type Word = [Lit; 32];

/// Tseitin encoder for the mixing circuit. Bit 0 of a word is the least
/// significant one.
struct Circuit {
    n_vars: u32,
    clauses: Vec<Clause>,
}

impl Circuit {
    fn fresh(&mut self) -> Lit {
        self.n_vars += 1;
        Var::new(self.n_vars).pos()
    }

    fn word(&mut self) -> Word {
        std::array::from_fn(|_| self.fresh())
    }

    fn add(&mut self, lits: &[Lit]) {
        self.clauses.push(Clause::new(lits.to_vec()));
    }

    fn xor2(&mut self, a: Lit, b: Lit) -> Lit {
        let z = self.fresh();
        self.add(&[!z, a, b]);
        self.add(&[!z, !a, !b]);
        self.add(&[z, !a, b]);
        self.add(&[z, a, !b]);
        z
    }

    fn xor3(&mut self, a: Lit, b: Lit, c: Lit) -> Lit {
        let z = self.fresh();
        for mask in 0..8u32 {
            // the row where (a, b, c) take the bits of `mask`
            let pick = |l: Lit, bit: u32| if mask >> bit & 1 == 1 { !l } else { l };
            let parity = mask.count_ones() % 2 == 1;
            let out = if parity { z } else { !z };
            self.add(&[pick(a, 0), pick(b, 1), pick(c, 2), out]);
        }
        z
    }

    fn and2(&mut self, a: Lit, b: Lit) -> Lit {
        let z = self.fresh();
        self.add(&[!z, a]);
        self.add(&[!z, b]);
        self.add(&[z, !a, !b]);
        z
    }

    fn maj(&mut self, a: Lit, b: Lit, c: Lit) -> Lit {
        let z = self.fresh();
        self.add(&[!z, a, b]);
        self.add(&[!z, a, c]);
        self.add(&[!z, b, c]);
        self.add(&[z, !a, !b]);
        self.add(&[z, !a, !c]);
        self.add(&[z, !b, !c]);
        z
    }

    fn add_words(&mut self, x: &Word, y: &Word) -> Word {
        let mut out = [x[0]; 32];
        out[0] = self.xor2(x[0], y[0]);
        let mut carry = self.and2(x[0], y[0]);
        for i in 1..32 {
            out[i] = self.xor3(x[i], y[i], carry);
            if i < 31 {
                carry = self.maj(x[i], y[i], carry);
            }
        }
        out
    }

    fn xor_words(&mut self, x: &Word, y: &Word) -> Word {
        std::array::from_fn(|i| self.xor2(x[i], y[i]))
    }

    fn round(&mut self, s: &mut [Word; WORDS]) {
        let [mut a, mut b, mut c, mut d] = *s;
        a = self.add_words(&a, &b);
        d = rotl(&self.xor_words(&d, &a), 16);
        c = self.add_words(&c, &d);
        b = rotl(&self.xor_words(&b, &c), 12);
        a = self.add_words(&a, &b);
        d = rotl(&self.xor_words(&d, &a), 8);
        c = self.add_words(&c, &d);
        b = rotl(&self.xor_words(&b, &c), 7);
        *s = [a, b, c, d];
    }
}

fn rotl(w: &Word, k: usize) -> Word {
    std::array::from_fn(|i| w[(i + 32 - k) % 32])
}

fn bit_lit(l: Lit, value: bool) -> Lit {
    if value {
        l
    } else {
        !l
    }
}

/// A hidden-key query together with its construction data.
pub struct HiddenKey {
    pub formula: PartitionedFormula,
    pub expected_sat: bool,
    /// Selector bits, local to the secondary part.
    pub selector: Vec<Var>,
    /// Input bits, the interface; word-major, least significant bit first.
    pub input: Vec<Var>,
    /// Output wires, word-major, least significant bit first.
    pub output: Vec<Lit>,
    pub candidates: Vec<Block>,
    pub target: Block,
    pub rounds: usize,
}

/// Secondary part: the selector picks one of `k` candidate messages for the
/// shared input. Main part: `rounds` mixing rounds with feed-forward and the
/// output fixed to a target. The satisfiable variant targets the hash of a
/// planted candidate, the other the hash of a message outside the list.
pub fn gen_hidden_key(rounds: usize, k: usize, seed: u64, sat: bool) -> Result<HiddenKey> {
    if rounds == 0 {
        return Err(Error::Generator("at least one round".into()));
    }
    if k == 0 || !k.is_power_of_two() {
        return Err(Error::Generator(format!("{k} candidates is not a power of two")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<Block> = (0..k).map(|_| rng.gen()).collect();
    let target = if sat {
        hash_native(&candidates[rng.gen_range(0..k)], rounds)
    } else {
        loop {
            let other: Block = rng.gen();
            let h = hash_native(&other, rounds);
            if !candidates.contains(&other)
                && candidates.iter().all(|c| hash_native(c, rounds) != h)
            {
                break h;
            }
        }
    };

    let sel_bits = k.trailing_zeros() as usize;
    let mut c = Circuit {
        n_vars: 0,
        clauses: Vec::new(),
    };
    let selector: Vec<Lit> = (0..sel_bits).map(|_| c.fresh()).collect();
    let input: [Word; WORDS] = std::array::from_fn(|_| c.word());

    let mut sec = Vec::new();
    for (j, msg) in candidates.iter().enumerate() {
        // !(selector == j)
        let guard: Vec<Lit> = selector
            .iter()
            .enumerate()
            .map(|(i, &l)| bit_lit(l, (j >> i) & 1 == 0))
            .collect();
        for (w, word) in input.iter().enumerate() {
            for (i, &l) in word.iter().enumerate() {
                let mut lits = guard.clone();
                lits.push(bit_lit(l, (msg[w] >> i) & 1 == 1));
                sec.push(Clause::new(lits));
            }
        }
    }

    let mut state = input;
    for _ in 0..rounds {
        c.round(&mut state);
    }
    let mut output = Vec::with_capacity(32 * WORDS);
    for w in 0..WORDS {
        let out = c.add_words(&state[w], &input[w]);
        for (i, &l) in out.iter().enumerate() {
            let fixed = bit_lit(l, (target[w] >> i) & 1 == 1);
            c.clauses.push(Clause::new(vec![fixed]));
            output.push(l);
        }
    }
    let n_vars = c.n_vars as usize;
    let formula = load_partitioned(sec, c.clauses, n_vars, None)?;
    Ok(HiddenKey {
        formula,
        expected_sat: sat,
        selector: selector.iter().map(|l| l.var()).collect(),
        input: input.iter().flatten().map(|l| l.var()).collect(),
        output,
        candidates,
        target,
        rounds,
    })
}

impl HiddenKey {
    /// Reads the input block from a model.
    pub fn input_of(&self, model: &[bool]) -> Block {
        std::array::from_fn(|w| {
            (0..32).fold(0u32, |acc, i| {
                acc | (u32::from(model[self.input[32 * w + i].index()]) << i)
            })
        })
    }
}
