from pydantic import BaseModel, ConfigDict


class Document(BaseModel):
    """Base for every JSON artifact ExplainHub writes.

    Serialization is deterministic: field order follows the model
    declaration, floats keep full precision, output ends with LF.
    """

    model_config = ConfigDict(extra="forbid")

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"
