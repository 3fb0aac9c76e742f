//! Continuation-based nondeterministic computations.
//!
//! A [`Comp<T>`] is a suspended computation that, when started with a
//! [`Consumer<T>`], delivers zero or more values to it. Deliveries are never
//! made by direct nested calls: every resumption of a consumer is pushed onto
//! the [`Agenda`] of the current run and executed later by the runner's loop.
//! This keeps the host call stack shallow no matter how deep the recursion in
//! the computation is, and lets the tests vary the scheduling policy to check
//! that the set of answers does not depend on it.

use std::cell::{Cell, RefCell};
use std::collections::VecDeque;
use std::fmt;
use std::rc::{Rc, Weak};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Receives the values produced by a computation. May be invoked any number
/// of times; each invocation is independent.
pub type Consumer<T> = Rc<dyn Fn(&Agenda, T)>;

type Task = Box<dyn FnOnce(&Agenda)>;
type RunFn<T> = Rc<dyn Fn(&Agenda, Consumer<T>)>;

/// Order in which pending work is taken off the agenda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Oldest task first. Results come out in discovery order.
    #[default]
    Fifo,
    /// Newest task first.
    Lifo,
    /// Uniformly random pending task, from a seeded generator.
    Random(u64),
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::Fifo => f.write_str("fifo"),
            Policy::Lifo => f.write_str("lifo"),
            Policy::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

/// Work-list of pending resumptions for a single top-level run.
pub struct Agenda {
    queue: RefCell<VecDeque<Task>>,
    policy: Policy,
    rng: RefCell<Option<ChaCha8Rng>>,
}

impl Agenda {
    fn new(policy: Policy) -> Self {
        let rng = match policy {
            Policy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Agenda {
            queue: RefCell::new(VecDeque::new()),
            policy,
            rng: RefCell::new(rng),
        }
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    /// Schedule delivery of `value` to `consumer`.
    pub fn resume<T: 'static>(&self, consumer: Consumer<T>, value: T) {
        self.schedule(move |agenda| consumer(agenda, value));
    }

    /// Schedule an arbitrary unit of work.
    pub fn schedule(&self, task: impl FnOnce(&Agenda) + 'static) {
        self.queue.borrow_mut().push_back(Box::new(task));
    }

    fn pop(&self) -> Option<Task> {
        let mut queue = self.queue.borrow_mut();
        match self.policy {
            Policy::Fifo => queue.pop_front(),
            Policy::Lifo => queue.pop_back(),
            Policy::Random(_) => {
                if queue.is_empty() {
                    return None;
                }
                let i = self
                    .rng
                    .borrow_mut()
                    .as_mut()
                    .expect("random policy has a generator")
                    .gen_range(0..queue.len());
                queue.swap_remove_back(i)
            }
        }
    }

    fn drain(&self) {
        while let Some(task) = self.pop() {
            task(self);
        }
    }
}

/// A suspended nondeterministic computation producing values of type `T`.
///
/// Cloning is cheap (reference counted), and running the same `Comp` twice
/// delivers equal multisets of values.
pub struct Comp<T> {
    run: RunFn<T>,
}

impl<T> Clone for Comp<T> {
    fn clone(&self) -> Self {
        Comp {
            run: Rc::clone(&self.run),
        }
    }
}

impl<T> fmt::Debug for Comp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Comp(..)")
    }
}

impl<T: Clone + 'static> Comp<T> {
    /// Build a computation from its raw run procedure. The procedure must hand
    /// values to the consumer through [`Agenda::resume`], never by calling it.
    pub fn from_fn(run: impl Fn(&Agenda, Consumer<T>) + 'static) -> Self {
        Comp { run: Rc::new(run) }
    }

    /// Start the computation, delivering its values to `consumer`.
    pub fn start(&self, agenda: &Agenda, consumer: Consumer<T>) {
        (self.run)(agenda, consumer)
    }

    /// Sequence: feed every value of `self` into `f` and deliver everything
    /// the resulting computations produce.
    pub fn then<U, F>(&self, f: F) -> Comp<U>
    where
        U: Clone + 'static,
        F: Fn(T) -> Comp<U> + 'static,
    {
        then(self, f)
    }

    pub fn map<U, F>(&self, f: F) -> Comp<U>
    where
        U: Clone + 'static,
        F: Fn(T) -> U + 'static,
    {
        then(self, move |x| pure(f(x)))
    }

    pub fn or(&self, other: &Comp<T>) -> Comp<T> {
        choice(self, other)
    }
}

/// Delivers exactly `x`, once.
pub fn pure<T: Clone + 'static>(x: T) -> Comp<T> {
    Comp::from_fn(move |agenda, k| agenda.resume(k, x.clone()))
}

/// Delivers nothing.
pub fn fail<T: Clone + 'static>() -> Comp<T> {
    Comp::from_fn(|_, _| {})
}

pub fn then<T, U, F>(c: &Comp<T>, f: F) -> Comp<U>
where
    T: Clone + 'static,
    U: Clone + 'static,
    F: Fn(T) -> Comp<U> + 'static,
{
    let c = c.clone();
    let f = Rc::new(f);
    Comp::from_fn(move |agenda, k: Consumer<U>| {
        let f = Rc::clone(&f);
        c.start(
            agenda,
            Rc::new(move |agenda: &Agenda, x: T| f(x).start(agenda, Rc::clone(&k))),
        );
    })
}

/// Delivers the multiset union of both branches. No deduplication happens
/// here; that is the memo tables' job.
pub fn choice<T: Clone + 'static>(a: &Comp<T>, b: &Comp<T>) -> Comp<T> {
    let (a, b) = (a.clone(), b.clone());
    Comp::from_fn(move |agenda, k: Consumer<T>| {
        let (a, b, k2) = (a.clone(), b.clone(), Rc::clone(&k));
        agenda.schedule(move |agenda| a.start(agenda, k));
        agenda.schedule(move |agenda| b.start(agenda, k2));
    })
}

/// `choice` folded over `cs`, with `fail` as the unit.
pub fn sum<T: Clone + 'static>(cs: impl IntoIterator<Item = Comp<T>>) -> Comp<T> {
    let cs: Rc<[Comp<T>]> = cs.into_iter().collect();
    Comp::from_fn(move |agenda, k: Consumer<T>| {
        for c in cs.iter() {
            let (c, k) = (c.clone(), Rc::clone(&k));
            agenda.schedule(move |agenda| c.start(agenda, k));
        }
    })
}

/// Hook run after a session's agenda has drained.
pub(crate) trait AfterRun {
    fn after_run(&self);
}

/// Scheduling context for top-level runs, and owner of the memo tables
/// allocated through it.
///
/// A session is confined to one thread. Distinct sessions share nothing.
pub struct Session {
    policy: Policy,
    running: Cell<bool>,
    runs: Cell<u64>,
    hooks: RefCell<Vec<Weak<dyn AfterRun>>>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Session::with_policy(Policy::Fifo)
    }

    pub fn with_policy(policy: Policy) -> Self {
        Session {
            policy,
            running: Cell::new(false),
            runs: Cell::new(0),
            hooks: RefCell::new(Vec::new()),
        }
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    /// Run `c` to completion and return every delivered value in delivery
    /// order. An empty result means the computation failed.
    ///
    /// Panics if called re-entrantly on the same session.
    pub fn run<T: Clone + 'static>(&self, c: &Comp<T>) -> Vec<T> {
        assert!(
            !self.running.replace(true),
            "Session::run called while another run is active"
        );
        // Each run gets its own agenda. With a seeded random policy the seed is
        // offset by the run count so successive runs do not replay one schedule.
        let policy = match self.policy {
            Policy::Random(seed) => Policy::Random(seed.wrapping_add(self.runs.get())),
            p => p,
        };
        let agenda = Agenda::new(policy);
        let results = Rc::new(RefCell::new(Vec::new()));
        let sink = Rc::clone(&results);
        c.start(
            &agenda,
            Rc::new(move |_: &Agenda, x: T| sink.borrow_mut().push(x)),
        );
        agenda.drain();
        self.runs.set(self.runs.get() + 1);
        self.hooks.borrow_mut().retain(|hook| match hook.upgrade() {
            Some(hook) => {
                hook.after_run();
                true
            }
            None => false,
        });
        self.running.set(false);
        Rc::try_unwrap(results)
            .map(RefCell::into_inner)
            .unwrap_or_else(|shared| shared.borrow().clone())
    }

    pub(crate) fn register(&self, hook: Weak<dyn AfterRun>) {
        self.hooks.borrow_mut().push(hook);
    }
}

/// Run `c` in a fresh FIFO session.
pub fn run<T: Clone + 'static>(c: &Comp<T>) -> Vec<T> {
    Session::new().run(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
        v.sort();
        v
    }

    #[test]
    fn pure_delivers_once() {
        assert_eq!(run(&pure(5)), vec![5]);
        assert_eq!(run(&pure("b")), vec!["b"]);
        assert_eq!(run(&pure(0)), vec![0]);
    }

    #[test]
    fn then_with_pure() {
        assert_eq!(run(&pure(2).then(|y| pure(y * 3))), vec![6]);
        assert_eq!(run(&fail::<i32>().then(|y| pure(y * 3))), Vec::<i32>::new());
        let c = choice(&pure(1), &pure(2)).then(|x| pure(x + 10));
        assert_eq!(sorted(run(&c)), vec![11, 12]);
        let c = pure(1).then(|x| choice(&pure(x), &pure(x + 1)));
        assert_eq!(sorted(run(&c)), vec![1, 2]);
    }

    #[test]
    fn fail_is_unit_of_choice() {
        assert_eq!(run(&fail::<i32>()), Vec::<i32>::new());
        assert_eq!(run(&choice(&fail(), &pure(7))), vec![7]);
        assert_eq!(run(&choice(&pure(7), &fail())), vec![7]);
    }

    #[test]
    fn choice_keeps_duplicates() {
        assert_eq!(sorted(run(&choice(&pure(1), &pure(2)))), vec![1, 2]);
        assert_eq!(run(&choice(&pure(1), &pure(1))), vec![1, 1]);
        let left = choice(&choice(&pure(1), &pure(2)), &pure(3));
        let right = choice(&pure(1), &choice(&pure(2), &pure(3)));
        assert_eq!(sorted(run(&left)), sorted(run(&right)));
    }

    #[test]
    fn sum_folds_choice() {
        assert_eq!(run(&sum(Vec::<Comp<i32>>::new())), Vec::<i32>::new());
        assert_eq!(run(&sum([pure(1)])), vec![1]);
        assert_eq!(sorted(run(&sum([pure(1), pure(2), pure(3)]))), vec![1, 2, 3]);
    }

    #[test]
    fn fifo_delivers_in_discovery_order() {
        assert_eq!(run(&sum([pure(1), pure(2), pure(3)])), vec![1, 2, 3]);
    }

    #[test]
    fn rerun_gives_same_results() {
        let s = Session::new();
        let c = sum([pure(1), pure(2)]).then(|x| choice(&pure(x), &pure(x * 10)));
        let first = sorted(s.run(&c));
        assert_eq!(first, vec![1, 2, 10, 20]);
        assert_eq!(sorted(s.run(&c)), first);
    }

    #[test]
    fn policies_agree_on_result_multisets() {
        let c = sum((0..6).map(pure)).then(|x| sum((0..x).map(move |y| pure(x * y))));
        let expected = sorted(run(&c));
        for policy in [Policy::Lifo, Policy::Random(1), Policy::Random(99)] {
            assert_eq!(sorted(Session::with_policy(policy).run(&c)), expected);
        }
    }

    fn countdown(n: u64) -> Comp<u64> {
        if n == 0 {
            pure(0)
        } else {
            pure(n - 1).then(countdown)
        }
    }

    #[test]
    fn deep_chains_do_not_overflow() {
        assert_eq!(run(&countdown(1_000_000)), vec![0]);
    }

    #[test]
    #[should_panic(expected = "another run is active")]
    fn reentrant_run_panics() {
        let s = Rc::new(Session::new());
        let inner = Rc::clone(&s);
        let c = pure(1).then(move |x| {
            inner.run(&pure(x));
            pure(x)
        });
        s.run(&c);
    }
}
