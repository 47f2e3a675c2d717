from pydantic_settings import BaseSettings

class Settings(BaseSettings):
    APP_NAME: str = "klr-lab"
    LOG_LEVEL: str = "INFO"

    # Scalar field - "QQ" for exact rationals, "GF" for a prime field
    SCALAR_FIELD: str = "QQ"
    PRIME: int = 0

    # Rewriting limits
    MAX_HEIGHT: int = 4
    REWRITE_GUARD: int = 200000

    # Sweeps - 1 runs instances sequentially in-process
    SWEEP_WORKERS: int = 1

    # Deterministic spot checks
    RANDOM_SEED: int = 1729
    ASSOCIATIVITY_SAMPLES: int = 64

    @property
    def is_prime_field(self) -> bool:
        """Check if arithmetic runs over F_p"""
        return self.SCALAR_FIELD.upper() == "GF"

    @property
    def is_parallel_sweep(self) -> bool:
        """Check if sweeps fan out to a process pool"""
        return self.SWEEP_WORKERS > 1

    class Config:
        env_file = ".env"
        # Environment variables take precedence over .env file
        env_file_encoding = 'utf-8'
        case_sensitive = True

settings = Settings()
