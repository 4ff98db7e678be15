use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use askless_core::inference::{incremental_update, query, DEFAULT_SAMPLES};
use askless_core::reduction::random_subset;
use askless_core::{rng, BayesianNetwork, Engine, Evidence, Posterior};
use rand::{Rng as _, SeedableRng};
use serde::Serialize;
use serde_json::Value;
use uuid::Uuid;

use crate::ServiceError;

pub const DEFAULT_TTL: Duration = Duration::from_secs(24 * 60 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub engine: Engine,
    pub n_samples: usize,
    pub ttl: Duration,
    /// Used when a create request does not name k.
    pub default_k: Option<usize>,
    /// Seeds the service RNG that picks questions for sessions created
    /// without an explicit seed. `None` draws from the OS.
    pub seed: Option<u64>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            engine: Engine::Exact,
            n_samples: DEFAULT_SAMPLES,
            ttl: DEFAULT_TTL,
            default_k: None,
            seed: None,
        }
    }
}

/// One respondent's survey in progress.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub k: usize,
    /// Variable indices, in presentation order.
    pub question_set: Vec<usize>,
    pub answered: Evidence,
    /// Prior first, then one posterior per accepted answer.
    pub posterior_trace: Vec<Posterior>,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    seed: u64,
    touched: Instant,
}

impl Session {
    pub fn posterior(&self) -> &Posterior {
        self.posterior_trace
            .last()
            .expect("trace starts with the prior")
    }

    pub fn remaining(&self) -> Vec<usize> {
        self.question_set
            .iter()
            .copied()
            .filter(|&v| !self.answered.contains(v))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.answered.len() == self.k
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuestionView {
    pub abbr: String,
    pub text: String,
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CreatedSession {
    pub id: String,
    pub k: usize,
    pub questions: Vec<QuestionView>,
    pub posterior: Value,
    pub segment: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnswerOutcome {
    pub posterior: Value,
    pub segment: String,
    pub answered_count: usize,
    pub remaining: Vec<String>,
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionView {
    pub id: String,
    pub k: usize,
    pub engine: Engine,
    pub questions: Vec<QuestionView>,
    pub answers: BTreeMap<String, String>,
    pub remaining: Vec<QuestionView>,
    pub answered_count: usize,
    pub posterior: Value,
    pub posterior_trace: Vec<Value>,
    pub segment: String,
    pub complete: bool,
    pub created_at: u64,
}

/// The loaded network plus every live session. Each session sits behind its
/// own lock, so answers to one session serialize while other sessions
/// proceed in parallel.
pub struct SurveyService {
    bn: Arc<BayesianNetwork>,
    config: ServiceConfig,
    pool: Vec<usize>,
    target: usize,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    rng: Mutex<rng::Rng>,
}

impl SurveyService {
    pub fn new(bn: BayesianNetwork, config: ServiceConfig) -> Result<Self, ServiceError> {
        let pool = bn.schema().asked_indices();
        if pool.is_empty() {
            return Err(ServiceError::InvalidRequest(
                "network has no askable questions".into(),
            ));
        }
        if config.n_samples == 0 {
            return Err(ServiceError::InvalidRequest(
                "sample count must be at least 1".into(),
            ));
        }
        if let Some(k) = config.default_k {
            check_k(k, pool.len())?;
        }
        let rng = match config.seed {
            Some(s) => rng::seeded(s),
            None => rng::Rng::from_entropy(),
        };
        Ok(SurveyService {
            target: bn.schema().label_index(),
            bn: Arc::new(bn),
            config,
            pool,
            sessions: Mutex::new(HashMap::new()),
            rng: Mutex::new(rng),
        })
    }

    pub fn network(&self) -> &BayesianNetwork {
        &self.bn
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn pool_size(&self) -> usize {
        self.pool.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map lock").len()
    }

    fn question_view(&self, v: usize) -> QuestionView {
        let q = self.bn.schema().question(v);
        QuestionView {
            abbr: q.abbr.clone(),
            text: q.text.clone(),
            levels: q.levels.clone(),
        }
    }

    fn query_seed(seed: u64, answered: usize) -> u64 {
        rng::stream(seed, 1, answered as u64).gen()
    }

    pub fn create_session(
        &self,
        k: Option<usize>,
        seed: Option<u64>,
    ) -> Result<CreatedSession, ServiceError> {
        let k = k
            .or(self.config.default_k)
            .ok_or_else(|| ServiceError::InvalidRequest("k is required".into()))?;
        check_k(k, self.pool.len())?;
        let seed = match seed {
            Some(s) => s,
            None => self.rng.lock().expect("service rng lock").gen(),
        };
        let question_set =
            random_subset(&self.pool, k, &mut rng::stream(seed, 0, 0)).map_err(|_| {
                ServiceError::KTooLarge {
                    k,
                    pool: self.pool.len(),
                }
            })?;
        let prior = query(
            &self.bn,
            self.target,
            &Evidence::new(),
            self.config.engine,
            self.config.n_samples,
            Self::query_seed(seed, 0),
        )?;
        let created_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let session = Session {
            id: Uuid::new_v4().simple().to_string(),
            k,
            question_set,
            answered: Evidence::new(),
            posterior_trace: vec![prior],
            created_at,
            seed,
            touched: Instant::now(),
        };
        let created = CreatedSession {
            id: session.id.clone(),
            k,
            questions: session
                .question_set
                .iter()
                .map(|&v| self.question_view(v))
                .collect(),
            posterior: session.posterior().probs_json(),
            segment: session.posterior().argmax_label().to_string(),
        };
        let mut sessions = self.sessions.lock().expect("session map lock");
        self.evict_expired(&mut sessions);
        sessions.insert(session.id.clone(), Arc::new(Mutex::new(session)));
        Ok(created)
    }

    fn evict_expired(&self, sessions: &mut HashMap<String, Arc<Mutex<Session>>>) {
        let ttl = self.config.ttl;
        sessions.retain(|_, s| match s.try_lock() {
            Ok(s) => s.touched.elapsed() <= ttl,
            // in use right now, so not idle
            Err(_) => true,
        });
    }

    fn lookup(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        let entry = self
            .sessions
            .lock()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or(ServiceError::UnknownSession)?;
        let expired = entry.lock().expect("session lock").touched.elapsed() > self.config.ttl;
        if expired {
            self.sessions.lock().expect("session map lock").remove(id);
            return Err(ServiceError::UnknownSession);
        }
        Ok(entry)
    }

    pub fn submit_answer(
        &self,
        id: &str,
        question: &str,
        value: &str,
    ) -> Result<AnswerOutcome, ServiceError> {
        let entry = self.lookup(id)?;
        let mut session = entry.lock().expect("session lock");
        let schema = self.bn.schema();
        let var = schema
            .index_of(question)
            .filter(|v| session.question_set.contains(v))
            .ok_or_else(|| ServiceError::QuestionNotInSet(question.to_string()))?;
        if session.answered.contains(var) {
            return Err(ServiceError::AlreadyAnswered(question.to_string()));
        }
        let level =
            schema
                .question(var)
                .level_index(value)
                .ok_or_else(|| ServiceError::InvalidLevel {
                    question: question.to_string(),
                    value: value.to_string(),
                })?;
        let answer =
            Evidence::from_indices(schema, [(var, level)]).expect("resolved against the schema");
        let posterior = incremental_update(
            &self.bn,
            self.target,
            &session.answered,
            &answer,
            self.config.engine,
            self.config.n_samples,
            Self::query_seed(session.seed, session.answered.len() + 1),
        )?;
        session.answered =
            askless_core::inference::merge_evidence(&self.bn, &session.answered, &answer)?;
        session.posterior_trace.push(posterior);
        session.touched = Instant::now();
        Ok(AnswerOutcome {
            posterior: session.posterior().probs_json(),
            segment: session.posterior().argmax_label().to_string(),
            answered_count: session.answered.len(),
            remaining: session
                .remaining()
                .into_iter()
                .map(|v| schema.question(v).abbr.clone())
                .collect(),
            complete: session.is_complete(),
        })
    }

    /// Copy of a session's state.
    pub fn session(&self, id: &str) -> Result<Session, ServiceError> {
        let entry = self.lookup(id)?;
        let mut session = entry.lock().expect("session lock");
        session.touched = Instant::now();
        Ok(session.clone())
    }

    pub fn session_view(&self, id: &str) -> Result<SessionView, ServiceError> {
        let s = self.session(id)?;
        Ok(SessionView {
            id: s.id.clone(),
            k: s.k,
            engine: self.config.engine,
            questions: s
                .question_set
                .iter()
                .map(|&v| self.question_view(v))
                .collect(),
            answers: s.answered.to_labels(self.bn.schema()),
            remaining: s
                .remaining()
                .into_iter()
                .map(|v| self.question_view(v))
                .collect(),
            answered_count: s.answered.len(),
            posterior: s.posterior().probs_json(),
            posterior_trace: s
                .posterior_trace
                .iter()
                .map(Posterior::probs_json)
                .collect(),
            segment: s.posterior().argmax_label().to_string(),
            complete: s.is_complete(),
            created_at: s.created_at,
        })
    }
}

fn check_k(k: usize, pool: usize) -> Result<(), ServiceError> {
    match k {
        0 => Err(ServiceError::InvalidRequest("k must be at least 1".into())),
        k if k > pool => Err(ServiceError::KTooLarge { k, pool }),
        _ => Ok(()),
    }
}
