//! `foodtracker`: run the service and administer its store.
//!
//! Exit status is 0 on success, 1 on a fatal error and 2 on a usage error.

use std::io::{self, BufRead};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use foodtracker_core::auth::SessionTable;
use foodtracker_core::corpus;
use foodtracker_core::parser::{ingest, resolve_root, DefaultFetcher};
use foodtracker_core::store::{parse_locations, parse_tips};
use foodtracker_core::Store;
use foodtracker_server::{AppState, Bind, Server};

#[derive(Parser)]
#[command(name = "foodtracker", version, about = "Traffic-light menu service and admin tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StoreArg {
    /// SQLite database file; created if missing.
    #[arg(long, env = "FOODTRACKER_STORE", default_value = "foodtracker.db")]
    store: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the JSON API.
    Serve {
        #[command(flatten)]
        store: StoreArg,
        /// Consumer listen address; also carries the admin routes unless
        /// --admin-bind is given.
        #[arg(long, env = "FOODTRACKER_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Separate listen address for the admin routes.
        #[arg(long)]
        admin_bind: Option<SocketAddr>,
        /// Idle lifetime of admin sessions, in seconds.
        #[arg(long, default_value_t = 1800, value_parser = clap::value_parser!(u64).range(1..))]
        session_ttl: u64,
        /// Nearby radius in meters when a request names none.
        #[arg(long, default_value_t = 500.0, value_parser = positive_meters)]
        default_radius: f64,
    },
    /// Crawl a menu repository and replace the menus it lists.
    Ingest {
        #[command(flatten)]
        store: StoreArg,
        /// Index page: an http(s) or file URL, a path to the page, or a
        /// directory holding index.html.
        #[arg(long)]
        root: String,
    },
    /// Load restaurant locations or tips from a text file.
    #[command(group = clap::ArgGroup::new("source").required(true).multiple(true))]
    Seed {
        #[command(flatten)]
        store: StoreArg,
        /// Lines of `name | lat,lon ; lat,lon ...`.
        #[arg(long, group = "source")]
        locations: Option<PathBuf>,
        /// Lines of `scope | label | text`; scope `*` applies everywhere.
        #[arg(long, group = "source")]
        tips: Option<PathBuf>,
    },
    /// Create an admin account or replace its credential.
    AdminAdd {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long)]
        username: String,
        /// Read the credential from the first line of stdin instead of
        /// prompting.
        #[arg(long)]
        credential_stdin: bool,
    },
    /// Write a generated fixture corpus with its manifest.
    GenCorpus {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=150))]
        restaurants: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn positive_meters(text: &str) -> Result<f64, String> {
    match text.parse::<f64>() {
        Ok(m) if m.is_finite() && m > 0.0 => Ok(m),
        _ => Err("expected a positive number of meters".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt().with_writer(io::stderr).with_target(false).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn open_store(arg: &StoreArg) -> anyhow::Result<Store> {
    Store::open(&arg.store).with_context(|| format!("cannot open store {}", arg.store.display()))
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Serve { store, bind, admin_bind, session_ttl, default_radius } => {
            let state = AppState::new(open_store(&store)?)
                .with_sessions(SessionTable::new(Duration::from_secs(session_ttl)))
                .with_default_radius(default_radius);
            serve(Bind { consumer: bind, admin: admin_bind }, state)
        }
        Command::Ingest { store, root } => {
            let store = open_store(&store)?;
            let root = resolve_root(&root)?;
            let report = ingest(&root, &DefaultFetcher::default(), &store)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Command::Seed { store, locations, tips } => {
            // Parse everything before touching the store.
            let locations = locations
                .map(|path| read_seed(&path, parse_locations).map(|entries| (path, entries)))
                .transpose()?;
            let tips = tips.map(|path| read_seed(&path, parse_tips).map(|entries| (path, entries))).transpose()?;
            let store = open_store(&store)?;
            if let Some((path, entries)) = locations {
                let count = store.seed_locations(&entries)?;
                println!("{}: {count} restaurants located", path.display());
            }
            if let Some((path, entries)) = tips {
                let count = store.seed_tips(&entries)?.len();
                println!("{}: {count} tips", path.display());
            }
            Ok(())
        }
        Command::AdminAdd { store, username, credential_stdin } => {
            let credential = if credential_stdin {
                let mut line = String::new();
                io::stdin().lock().read_line(&mut line)?;
                line.trim_end_matches(['\r', '\n']).to_owned()
            } else {
                rpassword::prompt_password(format!("Credential for {username}: "))?
            };
            if username.trim().is_empty() || credential.is_empty() {
                bail!("username and credential must not be empty");
            }
            open_store(&store)?.add_admin(&username, &credential)?;
            println!("admin {username} saved");
            Ok(())
        }
        Command::GenCorpus { out, restaurants, seed } => {
            let corpus = corpus::generate(restaurants as usize, seed);
            corpus.write_to(&out).with_context(|| format!("cannot write {}", out.display()))?;
            println!(
                "{}: {} restaurants, {} records",
                out.display(),
                corpus.manifest.restaurants.len(),
                corpus.manifest.total_records()
            );
            Ok(())
        }
    }
}

fn read_seed<T, E: std::fmt::Display>(path: &Path, parse: fn(&str) -> Result<T, E>) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn serve(bind: Bind, state: AppState) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let server = Server::bind(&bind, state).await.with_context(|| match bind.admin {
            Some(admin) => format!("cannot listen on {} and {admin}", bind.consumer),
            None => format!("cannot listen on {}", bind.consumer),
        })?;
        match bind.admin {
            Some(_) => eprintln!("consumer API on {}, admin on {}", server.consumer_addr()?, server.admin_addr()?),
            None => eprintln!("listening on {}", server.consumer_addr()?),
        }
        server
            .run(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
