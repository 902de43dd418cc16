//! Interactive hashing with linearly independent GF(2) queries.
//!
//! Over `m − 1` rounds the querier sends a fresh query `b_i`, independent of
//! all earlier ones, and the respondent answers `⟨b_i, W⟩`. The answers pin
//! `W` down to an affine line: exactly two strings, returned in lexicographic
//! order.

use rand::Rng;

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Row space of the queries so far, kept in insertion-reduced form.
#[derive(Clone, Debug, Default)]
struct Span {
    rows: Vec<(usize, BitString)>,
}

impl Span {
    fn reduce(&self, v: &BitString) -> BitString {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            if v.bit(*pivot) {
                v.xor_assign(row).expect("same length");
            }
        }
        v
    }

    fn is_independent(&self, v: &BitString) -> bool {
        self.reduce(v).weight() != 0
    }

    /// Adds `v`; returns false and leaves the span unchanged if dependent.
    fn insert(&mut self, v: &BitString) -> bool {
        let r = self.reduce(v);
        let pivot = r.ones_positions().next();
        match pivot {
            Some(pivot) => {
                self.rows.push((pivot, r));
                true
            }
            None => false,
        }
    }
}

/// Both solutions of `⟨b_i, x⟩ = c_i` for `m − 1` independent queries.
pub fn solve(m: usize, queries: &[BitString], responses: &[bool]) -> Result<(BitString, BitString)> {
    if queries.len() != responses.len() || m == 0 || queries.len() + 1 != m {
        return Err(Error::InteractiveHashing("need exactly m − 1 answered queries"));
    }
    let mut rows: Vec<(BitString, bool)> = queries.iter().cloned().zip(responses.iter().copied()).collect();
    if rows.iter().any(|(b, _)| b.len() != m) {
        return Err(Error::InteractiveHashing("query length differs from m"));
    }
    let mut pivots = Vec::with_capacity(m);
    for col in 0..m {
        let rank = pivots.len();
        let Some(p) = (rank..rows.len()).find(|&i| rows[i].0.bit(col)) else { continue };
        rows.swap(rank, p);
        let (pivot_row, pivot_rhs) = rows[rank].clone();
        for (i, (row, rhs)) in rows.iter_mut().enumerate() {
            if i != rank && row.bit(col) {
                row.xor_assign(&pivot_row)?;
                *rhs ^= pivot_rhs;
            }
        }
        pivots.push(col);
    }
    if pivots.len() != m - 1 {
        return Err(Error::InteractiveHashing("queries are linearly dependent"));
    }
    let free = (0..m).find(|c| !pivots.contains(c)).expect("one free column");
    let solution = |x_free: bool| -> BitString {
        let mut x = BitString::zeros(m);
        x.set(free, x_free).unwrap();
        for ((row, rhs), &p) in rows.iter().zip(&pivots) {
            x.set(p, *rhs ^ (row.bit(free) & x_free)).unwrap();
        }
        x
    };
    let (a, b) = (solution(false), solution(true));
    Ok(if a < b { (a, b) } else { (b, a) })
}

/// The two candidate strings, sorted, plus the respondent's index `d` with `w_d = W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IhOutcome {
    pub w0: BitString,
    pub w1: BitString,
    pub d: bool,
}

/// The querier's side (Alice in the transfer protocol).
#[derive(Clone, Debug)]
pub struct IhQuerier {
    m: usize,
    span: Span,
    queries: Vec<BitString>,
    responses: Vec<bool>,
}

impl IhQuerier {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InteractiveHashing("m ≥ 2"));
        }
        Ok(IhQuerier { m, span: Span::default(), queries: Vec::new(), responses: Vec::new() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn round(&self) -> usize {
        self.responses.len()
    }

    pub fn rounds(&self) -> usize {
        self.m - 1
    }

    pub fn is_complete(&self) -> bool {
        self.responses.len() == self.m - 1
    }

    fn ready_for_query(&self) -> Result<()> {
        if self.is_complete() {
            return Err(Error::State("interactive hashing already complete"));
        }
        if self.queries.len() != self.responses.len() {
            return Err(Error::State("awaiting response to previous query"));
        }
        Ok(())
    }

    /// Draws a query uniformly from the vectors outside the current span.
    pub fn next_query<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<BitString> {
        self.ready_for_query()?;
        loop {
            let b = BitString::random(self.m, rng);
            if self.span.insert(&b) {
                self.queries.push(b.clone());
                return Ok(b);
            }
        }
    }

    /// Uses a caller-chosen query; it must still be independent.
    pub fn submit_query(&mut self, b: BitString) -> Result<BitString> {
        self.ready_for_query()?;
        if b.len() != self.m {
            return Err(Error::LengthMismatch { left: b.len(), right: self.m });
        }
        if !self.span.insert(&b) {
            return Err(Error::InteractiveHashing("query depends on earlier queries"));
        }
        self.queries.push(b.clone());
        Ok(b)
    }

    pub fn receive(&mut self, c: bool) -> Result<()> {
        if self.queries.len() != self.responses.len() + 1 {
            return Err(Error::State("no outstanding query"));
        }
        self.responses.push(c);
        Ok(())
    }

    pub fn queries(&self) -> &[BitString] {
        &self.queries
    }

    pub fn responses(&self) -> &[bool] {
        &self.responses
    }

    pub fn finalize(&self) -> Result<(BitString, BitString)> {
        if !self.is_complete() {
            return Err(Error::State("interactive hashing not complete"));
        }
        solve(self.m, &self.queries, &self.responses)
    }
}

/// The respondent's side, holding the input `W`.
#[derive(Clone, Debug)]
pub struct IhRespondent {
    w: BitString,
    span: Span,
    queries: Vec<BitString>,
    responses: Vec<bool>,
}

impl IhRespondent {
    pub fn new(w: BitString) -> Result<Self> {
        if w.len() < 2 {
            return Err(Error::InteractiveHashing("m ≥ 2"));
        }
        Ok(IhRespondent { w, span: Span::default(), queries: Vec::new(), responses: Vec::new() })
    }

    pub fn m(&self) -> usize {
        self.w.len()
    }

    pub fn answered(&self) -> usize {
        self.responses.len()
    }

    pub fn is_complete(&self) -> bool {
        self.responses.len() + 1 == self.w.len()
    }

    /// Answers `⟨b, W⟩`; a malformed or dependent query is refused.
    pub fn respond(&mut self, b: &BitString) -> Result<bool> {
        if self.is_complete() {
            return Err(Error::InteractiveHashing("too many queries"));
        }
        if b.len() != self.w.len() {
            return Err(Error::InteractiveHashing("query length differs from m"));
        }
        if !self.span.is_independent(b) {
            return Err(Error::InteractiveHashing("query depends on earlier queries"));
        }
        self.span.insert(b);
        let c = b.dot(&self.w)?;
        self.queries.push(b.clone());
        self.responses.push(c);
        Ok(c)
    }

    pub fn finalize(&self) -> Result<IhOutcome> {
        if !self.is_complete() {
            return Err(Error::State("interactive hashing not complete"));
        }
        let (w0, w1) = solve(self.w.len(), &self.queries, &self.responses)?;
        let d = if w0 == self.w {
            false
        } else if w1 == self.w {
            true
        } else {
            return Err(Error::InteractiveHashing("input is not among the solutions"));
        };
        Ok(IhOutcome { w0, w1, d })
    }
}

/// Runs both sides in-process; convenient for tests and the harness.
pub fn run_honest<R: Rng + ?Sized>(w: &BitString, rng: &mut R) -> Result<IhOutcome> {
    let mut q = IhQuerier::new(w.len())?;
    let mut r = IhRespondent::new(w.clone())?;
    while !q.is_complete() {
        let b = q.next_query(rng)?;
        q.receive(r.respond(&b)?)?;
    }
    let outcome = r.finalize()?;
    debug_assert_eq!(q.finalize()?, (outcome.w0.clone(), outcome.w1.clone()));
    Ok(outcome)
}
