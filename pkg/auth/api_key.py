"""
API Key Authentication for the SwallowSense service
Format: swsn-<24 characters>
"""

import re
from typing import List

from fastapi import Depends, HTTPException
from fastapi.security import HTTPAuthorizationCredentials, HTTPBearer

from settings import get_settings

security = HTTPBearer()

API_KEY_PATTERN = r'^swsn-[a-zA-Z0-9]{24}$'


def validate_api_key_format(key: str) -> bool:
    """Validate API key format: swsn-<24 characters>"""
    return bool(re.match(API_KEY_PATTERN, key))


def get_valid_api_keys() -> List[str]:
    """Configured keys that have the right format"""
    return [key for key in get_settings().api_keys if validate_api_key_format(key)]


async def verify_api_key(credentials: HTTPAuthorizationCredentials = Depends(security)) -> str:
    """Verify API key and return it if valid"""
    if not validate_api_key_format(credentials.credentials):
        raise HTTPException(
            status_code=401,
            detail="Invalid API key format. Required: swsn-<24 characters>"
        )

    valid_keys = get_valid_api_keys()
    if not valid_keys:
        raise HTTPException(status_code=500, detail="No valid API keys configured")

    if credentials.credentials not in valid_keys:
        raise HTTPException(status_code=401, detail="API key required or invalid")

    return credentials.credentials
